#pragma once

// Slope estimates for holomorphic graphs and the grid constants (delta0, t0,
// delta^2 separation) consumed by the smoothing construction.  Constants
// that are only known to exist are certified by geometric grid search over
// dense samples.

#include <cstdint>
#include <vector>

#include "lamination/family.hpp"
#include "lamination/random.hpp"

namespace lam {

// f = exp(u) with u a polynomial and Re u < 0 on the unit disc, so that
// 0 < |f| < 1 there.
class NonvanishingSample {
 public:
  explicit NonvanishingSample(std::vector<Complex> u_coefficients, double validity_radius = 1.0);

  // u = -s (1 + v) with v random of degree <= max_degree and sampled
  // sup |v| < 1 on the circle, so Re u < 0 by construction.
  static NonvanishingSample random(CounterRng& rng, int max_degree = 8);

  Complex exponent(Complex z) const;             // u(z)
  Complex exponent_derivative(Complex z) const;  // u'(z)
  Complex value(Complex z) const { return std::exp(exponent(z)); }
  Complex derivative(Complex z) const { return exponent_derivative(z) * value(z); }

  // max Re u over a circle just inside the validity radius.
  double max_real_exponent_on_boundary(int points = 1024) const;

  const std::vector<Complex>& coefficients() const { return coef_; }
  double validity_radius() const { return radius_; }

 private:
  std::vector<Complex> coef_;
  double radius_;
};

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// |f'(0)| <= 2 |f(0)| log(1 / |f(0)|).  Throws PreconditionError when the
// sample has Re u >= 0 somewhere on the checked circle.
BoundCheck schwarz_log_bound(const NonvanishingSample& f);

// sup over the unit disc of |f_c - f_c2|, in closed form per family.
double sup_leaf_difference(const LeafFamily& fam, Complex c, Complex c2);

// |f_c'(z) - f_c2'(z)| <= 4 d log(1/d), d = |f_c(z) - f_c2(z)|, for |z| < 1/2.
// Throws PreconditionError when |z| >= 1/2, c == c2 or sup |f_c - f_c2| >= 1.
BoundCheck pair_slope_bound(const LeafFamily& fam, Complex c, Complex c2, Complex z);

struct GridConstants {
  double delta0 = 0.0;
  double t0 = 0.0;
  double R = 1.0;
  int N = 2;
};

// (1/4) log 2: the largest t0 for which delta^{e^{4 t0}} >= delta^2.
double t0_cap();

struct BatteryResult {
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;  // draws outside the hypotheses
  double worst_ratio = 0.0;  // max lhs / rhs over checked draws
};

BatteryResult schwarz_battery(std::size_t n, std::uint64_t seed, unsigned jobs = 1);

// Draws (c, c2, z) with |c|, |c2| <= 2R and |z| < 1/2; pairs with
// sup |f_c - f_c2| >= 1 are skipped and counted.
BatteryResult corollary_battery(const LeafFamily& fam, std::size_t n, std::uint64_t seed,
                                unsigned jobs = 1);

// Largest delta0 in {1, 1/2, 1/4, ...} (down to 2^-20) for which the slope
// estimate holds on every sampled |c - c'| < delta0, |c|, |c'| <= 2R,
// |z| <= 1/2.  Throws ConfigError when no level passes.
double delta0_search(const LeafFamily& fam, double R, std::size_t samples_per_level = 20000,
                     std::uint64_t seed = 7);

// Largest |w~_jk(z, f_{c(j+l,k+m)}(z)) - (l + m i)| over |l|, |m| < N, all
// cells with |c(j,k)| <= 2R and sampled |z| <= t.
double max_drift(const LeafFamily& fam, double delta, int N, double R, double t);

// Largest t0 in {cap, cap/2, ...} with max_drift < 1/10 for every delta in
// delta_list.  Throws PreconditionError for N < 2, ConfigError when no level
// passes.
double compute_t0(const LeafFamily& fam, const std::vector<double>& delta_list, int N, double R);

struct SeparationReport {
  double min_ratio = 0.0;        // min gap / delta^2
  double min_sharp_margin = 0.0;  // min gap / delta^{e^{4|z|}}
  bool pass = false;
};

// Adjacent grid leaves stay delta^2 apart on |z| <= t0, and the radial
// bound gap >= delta^{e^{4|z|}} holds.
SeparationReport separation_check(const LeafFamily& fam, double delta, double t0, double R);

}  // namespace lam
