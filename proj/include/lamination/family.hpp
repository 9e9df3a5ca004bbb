#pragma once

// Laminations of Delta x C by holomorphic graphs w = f_c(z), normalized so
// that f_c(0) = c.  Only closed-form builtin families are supported: every
// numerical check downstream needs the leaf value, its z-derivative, its
// c-derivative and the inverse map (z, w) -> c.

#include <cstdint>
#include <map>
#include <string>

#include "lamination/jet.hpp"

namespace lam {

enum class FamilyKind {
  Product,    // f_c(z) = c
  Shear,      // f_c(z) = c (1 + a z), |a| < 1
  Exp,        // f_c(z) = c exp(lam z)
  Nonlinear,  // f_c(z) = c + eps c^2 z, eps * 4R < 1
};

class LeafFamily {
 public:
  static LeafFamily product(double R = 1.0);
  static LeafFamily shear(Complex a, double R = 1.0);
  static LeafFamily exp(Complex lam, double R = 1.0);
  static LeafFamily nonlinear(double eps, double R = 1.0);

  FamilyKind kind() const { return kind_; }
  Complex a() const { return a_; }
  Complex lam() const { return lam_; }
  double eps() const { return eps_; }
  // Parameters are valid on |c| <= 2R.
  double radius() const { return R_; }
  double param_limit() const { return 2.0 * R_; }
  static constexpr double base_radius() { return 1.0; }

  // True when the closed-form constraints guaranteeing disjoint leaves on
  // |c| <= 2R hold (|a| < 1 for shear, eps * 4R < 1 for nonlinear).
  bool satisfies_constraints() const;

  std::string name() const;

  // Unchecked closed forms.
  Complex value(Complex c, Complex z) const;
  Complex slope(Complex c, Complex z) const;             // d f_c / dz
  Complex param_derivative(Complex c, Complex z) const;  // d f_c / dc
  // The unique c with f_c(z) = w.  Throws DomainError only where no branch
  // of the inverse is defined.
  Complex project(Complex z, Complex w) const;

  // f_c(z) as a jet, for c fixed and z carrying derivatives.
  CJet value(Complex c, const CJet& z) const {
    return apply_holomorphic(z, value(c, z.value()), slope(c, z.value()));
  }

  // pi(z, w) as a jet.
  CJet project(const CJet& z, const CJet& w) const;

  friend bool operator==(const LeafFamily&, const LeafFamily&) = default;

 private:
  LeafFamily(FamilyKind kind, double R) : kind_(kind), R_(R) {}

  FamilyKind kind_;
  Complex a_{};
  Complex lam_{};
  double eps_ = 0.0;
  double R_ = 1.0;
};

// Checked versions: |z| < 1 and |c| <= 2R, all inputs finite.
Complex leaf_value(const LeafFamily& fam, Complex c, Complex z);
Complex leaf_slope(const LeafFamily& fam, Complex c, Complex z);
Complex project(const LeafFamily& fam, Complex z, Complex w);

struct DisjointnessReport {
  double min_gap = 0.0;  // min |f_c(z) - f_c'(z)| / |c - c'|
  bool pass = false;
  Complex witness_c, witness_c2, witness_z;
};

// Samples (c, c', z) over the valid range, then refines the worst sample by
// compass search.  Passes when the minimum ratio stays above `tolerance`.
DisjointnessReport verify_disjointness(const LeafFamily& fam, std::size_t n_samples,
                                       std::uint64_t seed, double tolerance = 1e-6);

// Flat key/value descriptor {kind, a_re, a_im, lam_re, lam_im, eps, R}.
using Record = std::map<std::string, std::string>;
Record to_record(const LeafFamily& fam);
LeafFamily family_from_record(const Record& rec);

const char* kind_name(FamilyKind kind);
bool is_finite(Complex c);

}  // namespace lam
