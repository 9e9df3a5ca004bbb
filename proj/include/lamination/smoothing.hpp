#pragma once

// C^1 approximation of partially smooth functions on a lamination.
//
// The leaf-constant approximant h_delta equals j*delta on every grid leaf
// through c(j,k) = (j + k i) delta and interpolates between neighbouring grid
// leaves inside the quadrilateral they cut out of each fiber {z} x C.  In
// the normalized coordinate w~ of cell (j,k) the quadrilateral has corners
// 0, 1, a ~ i, b ~ 1 + i; the shear A_z moves a to i and the interpolation
// parameter t^ is constant on lines through the apex where the two
// "vertical" sides meet.  Neighbouring cells in the k direction are blended
// with a C^1 ramp in Im w~ across their shared edge.

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "lamination/approximant.hpp"
#include "lamination/grid.hpp"

namespace lam {

// chi(t) = S(2t - 1/2) with S(u) = 3u^2 - 2u^3, clamped to 0 below 1/4 and 1
// above 3/4.  |chi'| <= 3.
struct CutoffChi {
  static constexpr double kDerivativeBound = 3.0;
  static double value(double t);
  static double derivative(double t);
  static Jet value(const Jet& t);
};

inline double cutoff_chi(double t) { return CutoffChi::value(t); }

// Half-width of the strip around a shared horizontal edge where two local
// heights are blended.
inline constexpr double kGlueMargin = 0.25;

// Ramp equal to 0 below -kGlueMargin and 1 above kGlueMargin; |phi'| <= 3.
struct GlueRamp {
  static constexpr double kDerivativeBound = 1.5 / (2.0 * kGlueMargin);
  static double value(double s);
  static Jet value(const Jet& s);
};

// Lambda_j(t) = cos^2(pi (t - j delta) / (2 delta)) on [(j-1)delta, (j+1)delta].
struct BumpLambda {
  double delta;
  int j;
  double value(double t) const;
  double derivative(double t) const;
  Jet value(const Jet& t) const;
};

struct Point2 {
  double y1 = 0.0;
  double y2 = 0.0;
};

// Normalized geometry of one quadrilateral at a fixed base point.
struct QuadFrame {
  int j = 0;
  int k = 0;
  Point2 a;      // corner near (0,1), in w~ coordinates
  Point2 b;      // corner near (1,1), in w~ coordinates
  Point2 b_hat;  // A_z(b)
  // A_z(y) = (y1 - y2 a1/a2, y2 / a2), stored row-major.
  std::array<double, 4> shear{};
  // Apex of the two vertical sides is (0, -L); infinite when b_hat1 == 1.
  double L = 0.0;

  Point2 apply(Point2 y) const {
    return {shear[0] * y.y1 + shear[1] * y.y2, shear[2] * y.y1 + shear[3] * y.y2};
  }
  double shear_norm() const;  // operator 2-norm of A_z
};

QuadFrame make_frame(Point2 a, Point2 b, int j = 0, int k = 0);
QuadFrame quad_frame(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z);

// t^(y^) = y^1 L / (L + y^2); equals y^1 when the vertical sides are
// parallel.  Throws DomainError at the apex.
double leaf_parameter(const QuadFrame& frame, Point2 y_hat);

// h^delta_jk = j delta + delta chi(t^(A_z(w~_jk(z, w)))).  Throws
// DomainError outside the extension strip -1/2 <= Im y^ <= 3/2 and
// IndexError for cells outside the lattice.
double local_height(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z,
                    Complex w);

// The glued function h_delta.
double glue_heights(const LeafFamily& fam, const GridSpec& grid, Complex z, Complex w);

// Jet versions on a chart lamination; no range checks beyond the strip.
Jet local_height(const ChartLamination& lam, double delta, int j, int k, const CJet& z,
                 const CJet& w);
Jet glue_heights(const ChartLamination& lam, double delta, const CJet& z, const CJet& w);

// True when w lies strictly inside the straight-edged quadrilateral with
// corners f_c(j,k)(z), f_c(j+1,k)(z), f_c(j+1,k+1)(z), f_c(j,k+1)(z).
bool quadrilateral_contains(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z,
                            Complex w);

// h_delta as an approximant of Re pi (or Im pi, by rotating the chart).
// Throws ConfigError when adjacent grid leaves come closer than delta^2 on
// the chart disc or the target is not Re/Im pi.
Approximant leaf_constant_approximant(const LeafFamily& fam, Target target, const GridSpec& grid);

// psi(z, w) = sum phi(z, f_c(j,k)(z)) Lambda_j(Re pi) Lambda_k(Im pi), with
// pi the projection onto {p} x C.
Approximant bump_interpolant(const LeafFamily& fam, const PartiallySmoothFn& phi,
                             const GridSpec& grid);

struct ChartDisc {
  Complex center;
  double radius = 0.0;
};

struct LocalApproximant {
  ChartDisc chart;
  Approximant approx;
  double epsilon = 0.0;
};

struct PatchResult {
  Approximant approx;
  std::vector<double> gradient_bounds;  // C_alpha = sup |grad phi_alpha|
  int multiplicity = 0;                 // max number of overlapping supports
  double max_epsilon = 0.0;
  double error_bound = 0.0;             // m max C max eps + max eps
};

// psi = sum phi_alpha g_alpha with phi_alpha = beta_alpha / sum beta,
// beta_alpha(z) = (1 - |z - p|^2 / r^2)^2 supported on cover[alpha].  Each
// cover disc must lie in its local chart.  Evaluation outside every cover
// disc throws DomainError.
PatchResult partition_patch(std::vector<LocalApproximant> locals, std::vector<ChartDisc> cover);

// Per-chart tolerance eps / (2 (m C_alpha + 1)).
double epsilon_budget(double epsilon, int multiplicity, double gradient_bound);

// Discs of the given radius on a hexagonal net covering |z| <= domain_radius.
std::vector<ChartDisc> hexagonal_cover(double domain_radius, double chart_radius);

// Theorem-style global approximant: bump interpolants on a hexagonal cover
// patched by a partition of unity.
PatchResult patched_approximant(const LeafFamily& fam, const PartiallySmoothFn& phi, double delta,
                                double domain_radius, double chart_radius, double R);

struct SampleSpec {
  std::size_t n = 20000;
  std::uint64_t seed = 1;
};

struct ErrorReport {
  double sup_err = 0.0;
  double leaf_c1_err_x1 = 0.0;
  double leaf_c1_err_x2 = 0.0;
  std::size_t samples = 0;
  double delta = 0.0;

  double leaf_c1_err() const { return std::max(leaf_c1_err_x1, leaf_c1_err_x2); }
};

// Sup-norm and leafwise C^1 deviations over points (z, f_c(z)) with
// |z - p| <= t0 and |c| <= R.
ErrorReport error_report(const Approximant& psi, const PartiallySmoothFn& phi,
                         const LeafFamily& fam, const GridSpec& grid, const SampleSpec& samples);

// delta log(1 / (2 delta^2)).
double c1_model(double delta);

struct SweepRow {
  ErrorReport report;
  double fit_pred = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double fit = 0.0;           // least-squares slope of leaf_c1_err against c1_model
  double fit_residual = 0.0;  // max |err - fit model| / max err; 0 when all errors vanish

  void write_csv(std::ostream& out) const;
};

struct SweepOptions {
  double t0 = 0.1;
  double R = 1.0;
  Complex center{};
  SampleSpec samples;
};

// Re/Im pi use the leaf-constant approximant; other targets the bump
// interpolant.
Approximant build_approximant(const LeafFamily& fam, Target target, const GridSpec& grid);

SweepResult convergence_sweep(const LeafFamily& fam, Target target,
                              const std::vector<double>& delta_list, const SweepOptions& opt);

// Largest sampled |grad_{w~} g~_jk| / delta over the cells and base points.
double measure_gradient_constant(const LeafFamily& fam, const GridSpec& grid, int base_points = 8);

// Radius of the largest disc |w~| < r on which h_jk stays at its plateau.
double measure_constant_band(const LeafFamily& fam, const GridSpec& grid, int base_points = 8);

}  // namespace lam
