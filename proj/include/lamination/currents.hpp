#pragma once

// Directed currents T = sum w_i [Gamma_{c_i}] and their pairings with test
// forms, computed by pulling forms back to leaves and integrating over the
// base disc.  Orientation: dz ^ dzbar = -2i dx ^ dy.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lamination/family.hpp"
#include "lamination/quadrature.hpp"

namespace lam {

// A disc in the base coordinate z containing the support of a form.
struct Support {
  Complex center;
  double radius = 0.0;
};

using Coefficient = std::function<Complex(Complex z, Complex w)>;

// omega = w11 dz^dzbar + w12 dz^dwbar + w21 dw^dzbar + w22 dw^dwbar.
// Empty coefficients are zero.
struct Form11 {
  std::string id;
  Coefficient w11, w12, w21, w22;
  Support support;
};

// phi = phi1 dzbar + phi2 dwbar, with the complex derivatives d/dz and d/dw
// of both coefficients (needed only for closedness checks).
struct Form01 {
  std::string id;
  Coefficient phi1, phi2;
  Coefficient dphi1_dz, dphi1_dw, dphi2_dz, dphi2_dw;
  Support support;
};

// kappa dz ^ dzbar, supported everywhere in the given disc.
Form11 scalar_form(Complex kappa, Support support = {{}, 0.9});

// Radial bump (1 - |z - p|^2 / r^2)^4 on the support disc.
double bump(Complex z, const Support& s);
Complex bump_dz(Complex z, const Support& s);  // d/dz of the bump

// Batteries of bump forms with supports inside |z| <= support_limit.  The
// (1,1) forms are real and positive; the (0,1) forms have complex
// amplitudes.
std::vector<Form11> form11_battery(std::size_t n, std::uint64_t seed, double support_limit = 0.55);
std::vector<Form01> form01_battery(std::size_t n, std::uint64_t seed, double support_limit = 0.55);

struct Atom {
  Complex c;
  double weight = 1.0;
};

class DirectedCurrent {
 public:
  DirectedCurrent() = default;
  // Throws PreconditionError on a nonpositive weight and DomainError on a
  // parameter outside |c| <= 2R.
  DirectedCurrent(const LeafFamily& fam, std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;

 private:
  std::vector<Atom> atoms_;
};

// Random atomic current: n atoms with parameters uniform in the box
// [lo, hi] (as complex corners) and weights in [0.5, 2].
DirectedCurrent random_current(const LeafFamily& fam, std::size_t n, std::uint64_t seed,
                               Complex lo, Complex hi);

struct TangentPair {
  std::array<Complex, 2> v1;  // (1, f')
  std::array<Complex, 2> v2;  // (i, i f')
};

TangentPair tangent_2field(const LeafFamily& fam, Complex c, Complex z);

// omega(v1, v2) / (-2i): equals kappa for omega = kappa dz ^ dzbar.
Complex omega_on_v(const Form11& omega, const LeafFamily& fam, Complex c, Complex z);

// Integral of omega over the graph of f_c above the quadrature square.
// Throws ConfigError when the support is not inside both the quadrature
// square and the unit disc.
Complex leaf_integral(const LeafFamily& fam, Complex c, const Form11& omega, const Quadrature& quad);

Complex current_pair(const DirectedCurrent& T, const Form11& omega, const LeafFamily& fam,
                     const Quadrature& quad);

// One-form wedged with phi: the leaf-adapted lambda = dw - f'_{pi(z,w)}(z) dz,
// or the non-adapted dw and dz used as negative controls.
enum class WedgeForm { Lambda, Dw, Dz };

Form11 wedge(const LeafFamily& fam, WedgeForm which, const Form01& phi);

// |<T, which ^ phi>|.
double wedge_defect(const DirectedCurrent& T, const Form01& phi, const LeafFamily& fam,
                    const Quadrature& quad, WedgeForm which = WedgeForm::Lambda);

// Mass-weighted point of the total space.
struct WeightedPoint {
  Complex z;
  Complex w;
  double mass = 0.0;
};

// The trace measure of T: each atom receives n / atoms iid samples with z
// uniform on the disc |z| <= radius and mass weight * area / count.
std::vector<WeightedPoint> riesz_samples(const DirectedCurrent& T, const LeafFamily& fam,
                                         std::size_t n, std::uint64_t seed, double radius = 0.56);

// Axis-aligned box of the plane given by its lower-left and upper-right
// corners.
struct Box {
  Complex lo;
  Complex hi;

  bool contains(Complex p) const {
    return p.real() >= lo.real() && p.real() <= hi.real() && p.imag() >= lo.imag() &&
           p.imag() <= hi.imag();
  }
};

struct Bin {
  int ix = 0;
  int iy = 0;
  Complex alpha;      // mass-weighted mean parameter
  double mass = 0.0;  // mu'
  // Conditional density on the base box, integrating to 1.
  std::function<double(Complex)> sigma;
  std::vector<double> histogram;  // base-cell densities, row ix * cells + iy
};

struct Disintegration {
  Box param_box;
  Box base_box;
  int bins_per_axis = 0;
  int base_cells = 0;
  std::vector<Bin> bins;  // occupied bins only, ordered by (ix, iy)

  double total_mass() const;
};

struct DisintegrationOptions {
  int bins_per_axis = 8;
  int base_cells = 28;
  Box param_box{{-2.0, -2.0}, {2.0, 2.0}};
  Box base_box{{-0.56, -0.56}, {0.56, 0.56}};
};

// Pushes samples to c = pi(z, w), bins them on the parameter box and builds
// each bin's base histogram.  Throws PreconditionError on empty input or
// points outside either box.
Disintegration disintegrate(const LeafFamily& fam, const std::vector<WeightedPoint>& samples,
                            const DisintegrationOptions& opt = {});

// Exact disintegrations of T with sigma the normalized area of the disc
// |z - z0| <= radius, optionally tilted by (1 + kappa Re(z - z0)).
Disintegration uniform_disintegration(const DirectedCurrent& T, Complex z0, double radius);
Disintegration tilted_disintegration(const DirectedCurrent& T, Complex z0, double radius,
                                     double kappa);

struct ReconstructionRow {
  std::string form_id;
  Complex direct;
  Complex reconstructed;
  double residual = 0.0;  // |direct - reconstructed| / |direct|; absolute when direct == 0
};

// Compares T(omega) with -2i sum_bins mu' int psi1(z, f_alpha(z)) sigma dA,
// integrating each base cell with a tensor rule of cell_order.
std::vector<ReconstructionRow> reconstruct_and_compare(const DirectedCurrent& T,
                                                       const Disintegration& dis,
                                                       const std::vector<Form11>& forms,
                                                       const LeafFamily& fam, const Quadrature& quad,
                                                       int cell_order = 4);

// sum_bins g(alpha) mu' T_alpha(d omega) over the forms, with T_alpha the
// leaf integral against sigma on a tensor rule over each form's support;
// returns the largest magnitude.
double closedness_residual(const Disintegration& dis, const LeafFamily& fam,
                           const std::vector<Form01>& forms,
                           const std::function<double(Complex)>& g, int order = 64);

// Pullback density of d omega for a (0,1)-form along the leaf c.
Complex d_form_density(const Form01& phi, const LeafFamily& fam, Complex c, Complex z);

}  // namespace lam
