#pragma once

// Two laminations where leafwise C^1 approximation fails: the real cubic
// curves y = (x - t)^3, all tangent to the x-axis, and the complex curves
// s -> (s, (s - t)^2, (s - t)^3) tangent to the z-axis of C^3.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamination/jet.hpp"

namespace lam {

namespace cubic {

inline double leaf(double t, double x) { return (x - t) * (x - t) * (x - t); }
inline double slope(double t, double x) { return 3.0 * (x - t) * (x - t); }
// Leaf parameter x - y^{1/3}, signed real cube root.
double project(double x, double y);

}  // namespace cubic

namespace curve3 {

using Point = std::array<Complex, 3>;

Point leaf(Complex t, Complex s);
Point tangent(Complex t, Complex s);  // d/ds
// t = z - tau / w, and t = z on w = 0.
Complex project(const Point& p);

}  // namespace curve3

struct TangencyReport {
  double max_value = 0.0;  // |f_t(t)| and |gamma_t(t) - (t, 0, 0)|
  double max_slope = 0.0;  // |f_t'(t)| and |gamma_t'(t) - (1, 0, 0)|
  bool pass = false;
};

TangencyReport cubic_tangency_check(const std::vector<double>& real_ts,
                                    const std::vector<Complex>& complex_ts);

// Largest |project(gamma_t(s)) - t| over random t, s with |t|, |s - t| <= 1.
double curve3_roundtrip_error(std::size_t n, std::uint64_t seed);

enum class AxisForm { Lambda, Dx };

// Pairing of the current of integration over [lo, hi] x {0} with g times the
// leaf-adapted lambda = dy - f_t'(x) dx, t = project(x, 0), or with g dx.
double axis_weak_directedness(double lo, double hi, const std::function<double(double)>& g,
                              AxisForm form = AxisForm::Lambda, int order = 64);

// C^3 analogue: |sum_k int_{|z| <= r} g(z) lambda_k(d/dz) dA| over the
// leaf-adapted forms dw - 2(z - t) dz and dtau - 3(z - t)^2 dz on the
// z-axis.
double axis_weak_directedness_c3(double radius, const std::function<Complex(Complex)>& g,
                                 int order = 64);

// exp(1 - 1 / (1 - s^2)) on |s| < 1; equals 1 at 0.
double witness_bump(double s);

struct WitnessRow {
  double epsilon = 0.0;
  double axis_pairing = 0.0;
  double leaf_pairing = 0.0;
  double exponent_fit = 0.0;  // log-log slope over the whole list
};

struct WitnessReport {
  std::vector<WitnessRow> rows;
  double exponent = 0.0;
  double leaf_constant = 0.0;  // C with leaf pairing <= C eps^{1/3}
  double mass_bound = 0.0;
  // Below this epsilon every transverse measure of mass <= M pairs below
  // the axis value.
  double contradiction_epsilon = 0.0;
  bool axis_constant = false;
};

// Pairing of the axis and of the leaf t with bump(y / eps) dx on x in [-1, 1].
double axis_bump_pairing(double epsilon);
double leaf_bump_pairing(double t, double epsilon);

// Throws PreconditionError unless eps_list is positive and decreasing.
WitnessReport non_directedness_witness(double mass_bound, const std::vector<double>& eps_list);

// A C^1 function on the plane with optional analytic gradient.
struct C1Candidate {
  std::string id;
  std::function<double(double x, double y)> value;
  std::function<std::array<double, 2>(double x, double y)> gradient;
};

struct ObstructionReport {
  std::string candidate_id;
  double eta = 0.0;       // sup |psi - a|
  double eps = 0.0;       // sup |leafwise derivative of psi|
  double combined = 0.0;  // 2 eta + eps
  bool pass = false;      // combined >= 1 - tol
  std::string warning;    // set when the gradient came from finite differences
};

struct ObstructionOptions {
  double x_lo = 0.0, x_hi = 1.0, y_lo = -1.0, y_hi = 1.0;
  int grid = 201;       // per axis
  int axis_row = 2001;  // extra samples on y = 0
  double tol = 0.02;
};

// a(x, y) = x - y^{1/3}.
double leaf_coordinate(double x, double y);

ObstructionReport approx_obstruction(const C1Candidate& psi, const ObstructionOptions& opt = {});

// The leaf-constant smoothing built naively on the grid leaves t = j delta.
C1Candidate naive_smoothing_candidate(double delta);
// a convolved with a product of normalized bumps of the given radius.
C1Candidate mollified_candidate(double radius);
// Least-squares fit of a by Legendre polynomials of total degree <= degree
// on the obstruction box.
C1Candidate polynomial_candidate(int degree, const ObstructionOptions& box = {});

// The candidate set: naive smoothing at 4 deltas, mollification at 3 radii,
// polynomial fits of degree 1..10.
std::vector<C1Candidate> obstruction_candidates();

}  // namespace lam
