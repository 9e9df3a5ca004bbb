#pragma once

// The delta-grid of leaves used as scaffolding by the smoothing
// construction, and the chart in which its leaves are labelled.

#include <cmath>

#include "lamination/family.hpp"

namespace lam {

struct GridSpec {
  double delta = 0.1;
  double t0 = 0.1;
  double R = 1.0;
  Complex center{};  // chart center p in the base disc

  // Lattice label of grid leaf (j, k).
  Complex point(int j, int k) const { return Complex(j, k) * delta; }

  // Grid points with |c(j,k)| <= 2R.
  bool in_range(int j, int k) const { return std::abs(point(j, k)) <= 2.0 * R * (1.0 + 1e-12); }
  int index_bound() const { return static_cast<int>(std::ceil(2.0 * R / delta)); }
};

// Validates delta > 0, t0 > 0, R > 0 and that the chart disc lies in the
// unit disc; throws ConfigError otherwise.
void validate(const GridSpec& grid);

// Leaves of a family labelled by the point where they cross {p} x C, then
// multiplied by a unit rotation.  Label u corresponds to the leaf through
// (p, u / rotation), and g_u(z) = rotation * f_c(z).  With p = 0 and
// rotation 1 this is the family itself.
class ChartLamination {
 public:
  ChartLamination(const LeafFamily& fam, Complex center = {}, Complex rotation = 1.0);

  const LeafFamily& family() const { return fam_; }
  Complex center() const { return center_; }
  Complex rotation() const { return rot_; }

  Complex value(Complex u, Complex z) const;
  CJet value(Complex u, const CJet& z) const;
  Complex project(Complex z, Complex w) const;
  CJet project(const CJet& z, const CJet& w) const;

  // Global family parameter of the leaf with label u.
  Complex family_parameter(Complex u) const;

 private:
  LeafFamily fam_;
  Complex center_;
  Complex rot_;
  bool identity_;
};

// (w - f_{c(j,k)}(z)) / (f_{c(j+1,k)}(z) - f_{c(j,k)}(z)), leaves labelled at
// the grid center.  Throws IndexError when (j, k) is outside the lattice.
Complex normalized_w(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z,
                     Complex w);

// Same map on a chart lamination, with derivatives.  No range checks.
CJet normalized_w(const ChartLamination& lam, double delta, int j, int k, const CJet& z,
                  const CJet& w);

}  // namespace lam
