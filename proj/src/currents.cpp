#include "lamination/currents.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "lamination/errors.hpp"
#include "lamination/random.hpp"

namespace lam {

namespace {

const Complex kMinusTwoI(0.0, -2.0);

Complex eval(const Coefficient& f, Complex z, Complex w) { return f ? f(z, w) : Complex{}; }

bool in_support(const Support& s, Complex z) { return std::abs(z - s.center) < s.radius; }

void check_support(const Support& s, const Quadrature& quad) {
  if (!quad.domain().contains_disc(s.center, s.radius))
    throw ConfigError("form support is not inside the quadrature square");
  if (!(std::abs(s.center) + s.radius < 1.0))
    throw ConfigError("form support is not inside the unit disc");
}

void check_parameter(const LeafFamily& fam, Complex c) {
  if (!is_finite(c) || std::abs(c) > fam.param_limit() * (1.0 + 1e-12))
    throw DomainError(fmt::format("leaf parameter {}+{}i outside |c| <= 2R", c.real(), c.imag()));
}

Support random_support(CounterRng& r, double limit) {
  const Complex p = r.in_disc(0.15 * limit);
  const double radius = limit - std::abs(p);
  return {p, radius};
}

// Amplitude times bump times (1 + beta w).
struct BumpTerm {
  Complex amp;
  Complex beta;
  Support s;

  Complex value(Complex z, Complex w) const { return amp * bump(z, s) * (1.0 + beta * w); }
  Complex dz(Complex z, Complex w) const { return amp * bump_dz(z, s) * (1.0 + beta * w); }
  Complex dw(Complex z, Complex) const { return amp * bump(z, s) * beta; }
};

Complex random_amplitude(CounterRng& r) {
  return std::polar(r.uniform(1.0, 2.0), 2.0 * std::numbers::pi * r.uniform());
}

Square box_square(const Box& b) {
  const double hx = 0.5 * (b.hi.real() - b.lo.real());
  const double hy = 0.5 * (b.hi.imag() - b.lo.imag());
  if (!(hx > 0.0) || std::abs(hx - hy) > 1e-12 * hx)
    throw ConfigError("base box of a disintegration must be a square");
  return {0.5 * (b.lo + b.hi), hx};
}

Complex sigma_integral(const Bin& bin, const Quadrature& base,
                       const std::function<Complex(Complex)>& density) {
  Complex acc;
  const auto& pts = base.points();
  const auto& wts = base.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double s = bin.sigma(pts[i]);
    if (s == 0.0) continue;
    acc += wts[i] * s * density(pts[i]);
  }
  return acc;
}

Disintegration exact_disintegration(const DirectedCurrent& T, Complex z0, double radius,
                                    double kappa) {
  if (!(radius > 0.0) || std::abs(z0) + radius >= 1.0)
    throw PreconditionError("disintegration disc must lie inside the unit disc");
  if (!(std::abs(kappa) * radius < 1.0))
    throw PreconditionError("tilt must keep the conditional density positive");
  const double area = std::numbers::pi * radius * radius;
  Disintegration dis;
  dis.base_box = {z0 - Complex(radius, radius), z0 + Complex(radius, radius)};
  dis.bins_per_axis = static_cast<int>(T.atoms().size());
  dis.base_cells = 16;
  Complex lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  Complex hi = -lo;
  int index = 0;
  for (const Atom& a : T.atoms()) {
    lo = {std::min(lo.real(), a.c.real()), std::min(lo.imag(), a.c.imag())};
    hi = {std::max(hi.real(), a.c.real()), std::max(hi.imag(), a.c.imag())};
    Bin bin;
    bin.ix = index++;
    bin.alpha = a.c;
    bin.mass = a.weight * area;
    bin.sigma = [z0, radius, kappa, area](Complex z) {
      if (std::abs(z - z0) > radius) return 0.0;
      return (1.0 + kappa * (z - z0).real()) / area;
    };
    dis.bins.push_back(std::move(bin));
  }
  dis.param_box = {lo, hi};
  return dis;
}

}  // namespace

Form11 scalar_form(Complex kappa, Support support) {
  Form11 f;
  f.id = "scalar";
  f.w11 = [kappa](Complex, Complex) { return kappa; };
  f.support = support;
  return f;
}

double bump(Complex z, const Support& s) {
  const double t = std::norm(z - s.center) / (s.radius * s.radius);
  if (t >= 1.0) return 0.0;
  const double u = 1.0 - t;
  return u * u * u * u;
}

Complex bump_dz(Complex z, const Support& s) {
  const double r2 = s.radius * s.radius;
  const double t = std::norm(z - s.center) / r2;
  if (t >= 1.0) return 0.0;
  const double u = 1.0 - t;
  // d/dz |z - p|^2 = conj(z - p)
  return -4.0 * u * u * u * std::conj(z - s.center) / r2;
}

std::vector<Form11> form11_battery(std::size_t n, std::uint64_t seed, double support_limit) {
  const CounterRng rng(seed, 0xf11);
  std::vector<Form11> forms;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = rng.at(i);
    const Support s = random_support(r, support_limit);
    // omega = i sum h_ab da ^ dbbar with h positive definite: a real,
    // positive form.
    const double h11 = r.uniform(1.0, 2.0);
    const double h22 = r.uniform(1.0, 2.0);
    const Complex h12 = std::polar(0.5 * r.uniform(), 2.0 * std::numbers::pi * r.uniform());
    const Complex beta = 0.3 * Complex(r.normal(), r.normal());
    auto coefficient = [s, beta](Complex h) {
      return [s, beta, h](Complex z, Complex w) {
        return Complex(0.0, 1.0) * h * bump(z, s) * (1.0 + 0.25 * std::sin((beta * w).real()));
      };
    };
    Form11 f;
    f.id = fmt::format("w11_{}", i);
    f.support = s;
    f.w11 = coefficient(h11);
    f.w12 = coefficient(h12);
    f.w21 = coefficient(std::conj(h12));
    f.w22 = coefficient(h22);
    forms.push_back(std::move(f));
  }
  return forms;
}

std::vector<Form01> form01_battery(std::size_t n, std::uint64_t seed, double support_limit) {
  const CounterRng rng(seed, 0xf01);
  std::vector<Form01> forms;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = rng.at(i);
    const Support s = random_support(r, support_limit);
    const BumpTerm a{random_amplitude(r), 0.3 * Complex(r.normal(), r.normal()), s};
    const BumpTerm b{random_amplitude(r), 0.3 * Complex(r.normal(), r.normal()), s};
    Form01 f;
    f.id = fmt::format("w01_{}", i);
    f.support = s;
    f.phi1 = [a](Complex z, Complex w) { return a.value(z, w); };
    f.phi2 = [b](Complex z, Complex w) { return b.value(z, w); };
    f.dphi1_dz = [a](Complex z, Complex w) { return a.dz(z, w); };
    f.dphi1_dw = [a](Complex z, Complex w) { return a.dw(z, w); };
    f.dphi2_dz = [b](Complex z, Complex w) { return b.dz(z, w); };
    f.dphi2_dw = [b](Complex z, Complex w) { return b.dw(z, w); };
    forms.push_back(std::move(f));
  }
  return forms;
}

DirectedCurrent::DirectedCurrent(const LeafFamily& fam, std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw PreconditionError("directed current atoms need positive finite weights");
    check_parameter(fam, a.c);
  }
}

double DirectedCurrent::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.weight;
  return m;
}

DirectedCurrent random_current(const LeafFamily& fam, std::size_t n, std::uint64_t seed,
                               Complex lo, Complex hi) {
  const CounterRng rng(seed, 0xa70);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = rng.at(i);
    const Complex c(r.uniform(lo.real(), hi.real()), r.uniform(lo.imag(), hi.imag()));
    atoms.push_back({c, r.uniform(0.5, 2.0)});
  }
  return DirectedCurrent(fam, std::move(atoms));
}

TangentPair tangent_2field(const LeafFamily& fam, Complex c, Complex z) {
  const Complex s = leaf_slope(fam, c, z);
  const Complex i(0.0, 1.0);
  return {{Complex(1.0), s}, {i, i * s}};
}

Complex omega_on_v(const Form11& omega, const LeafFamily& fam, Complex c, Complex z) {
  const TangentPair v = tangent_2field(fam, c, z);
  const Complex w = fam.value(c, z);
  // p(v) for p in {dz, dw}; conj gives dzbar, dwbar.
  auto pair = [&](int p, int q) {
    return v.v1[p] * std::conj(v.v2[q]) - v.v2[p] * std::conj(v.v1[q]);
  };
  const Complex value = eval(omega.w11, z, w) * pair(0, 0) + eval(omega.w12, z, w) * pair(0, 1) +
                        eval(omega.w21, z, w) * pair(1, 0) + eval(omega.w22, z, w) * pair(1, 1);
  // 1 / (-2i) = i / 2
  return value * Complex(0.0, 0.5);
}

Complex leaf_integral(const LeafFamily& fam, Complex c, const Form11& omega,
                      const Quadrature& quad) {
  check_support(omega.support, quad);
  check_parameter(fam, c);
  Complex acc;
  const auto& pts = quad.points();
  const auto& wts = quad.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!in_support(omega.support, pts[i])) continue;
    acc += wts[i] * omega_on_v(omega, fam, c, pts[i]);
  }
  return kMinusTwoI * acc;
}

Complex current_pair(const DirectedCurrent& T, const Form11& omega, const LeafFamily& fam,
                     const Quadrature& quad) {
  check_support(omega.support, quad);
  Complex acc;
  for (const Atom& a : T.atoms()) acc += a.weight * leaf_integral(fam, a.c, omega, quad);
  return acc;
}

Form11 wedge(const LeafFamily& fam, WedgeForm which, const Form01& phi) {
  Form11 f;
  f.id = phi.id;
  f.support = phi.support;
  switch (which) {
    case WedgeForm::Lambda: {
      auto slope = [fam](Complex z, Complex w) { return fam.slope(project(fam, z, w), z); };
      f.w11 = [slope, p = phi.phi1](Complex z, Complex w) { return -slope(z, w) * eval(p, z, w); };
      f.w12 = [slope, p = phi.phi2](Complex z, Complex w) { return -slope(z, w) * eval(p, z, w); };
      f.w21 = phi.phi1;
      f.w22 = phi.phi2;
      break;
    }
    case WedgeForm::Dw:
      f.w21 = phi.phi1;
      f.w22 = phi.phi2;
      break;
    case WedgeForm::Dz:
      f.w11 = phi.phi1;
      f.w12 = phi.phi2;
      break;
  }
  return f;
}

double wedge_defect(const DirectedCurrent& T, const Form01& phi, const LeafFamily& fam,
                    const Quadrature& quad, WedgeForm which) {
  if (!phi.phi1 && !phi.phi2) return 0.0;
  return std::abs(current_pair(T, wedge(fam, which, phi), fam, quad));
}

std::vector<WeightedPoint> riesz_samples(const DirectedCurrent& T, const LeafFamily& fam,
                                         std::size_t n, std::uint64_t seed, double radius) {
  if (!(radius > 0.0 && radius < 1.0)) throw PreconditionError("sampling disc must lie in the unit disc");
  std::vector<WeightedPoint> out;
  const std::size_t k = T.atoms().size();
  if (k == 0 || n == 0) return out;
  out.reserve(n);
  const CounterRng rng(seed, 0x7a5);
  const double area = std::numbers::pi * radius * radius;
  std::size_t index = 0;
  for (std::size_t a = 0; a < k; ++a) {
    const Atom& atom = T.atoms()[a];
    const std::size_t count = n / k + (a < n % k ? 1 : 0);
    const double mass = atom.weight * area / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i, ++index) {
      CounterRng r = rng.at(index);
      const Complex z = r.in_disc(radius);
      out.push_back({z, fam.value(atom.c, z), mass});
    }
  }
  return out;
}

double Disintegration::total_mass() const {
  double m = 0.0;
  for (const Bin& b : bins) m += b.mass;
  return m;
}

Disintegration disintegrate(const LeafFamily& fam, const std::vector<WeightedPoint>& samples,
                            const DisintegrationOptions& opt) {
  if (samples.empty()) throw PreconditionError("disintegrate: no samples");
  if (opt.bins_per_axis < 1 || opt.base_cells < 1)
    throw PreconditionError("disintegrate: bin counts must be positive");
  const Square base = box_square(opt.base_box);
  const int nb = opt.bins_per_axis;
  const int nc = opt.base_cells;
  const double pw = (opt.param_box.hi.real() - opt.param_box.lo.real()) / nb;
  const double ph = (opt.param_box.hi.imag() - opt.param_box.lo.imag()) / nb;
  const double cell = 2.0 * base.half_width / nc;

  struct Acc {
    double mass = 0.0;
    Complex moment;
    std::vector<double> cells;
  };
  std::map<std::pair<int, int>, Acc> acc;
  auto index = [](double x, double lo, double width, int n) {
    return std::clamp(static_cast<int>(std::floor((x - lo) / width)), 0, n - 1);
  };
  for (const WeightedPoint& s : samples) {
    if (!(s.mass >= 0.0)) throw PreconditionError("disintegrate: negative sample mass");
    if (!opt.base_box.contains(s.z))
      throw PreconditionError("disintegrate: sample outside the base box");
    const Complex c = project(fam, s.z, s.w);
    if (!opt.param_box.contains(c))
      throw PreconditionError("disintegrate: sample parameter outside the parameter box");
    Acc& a = acc[{index(c.real(), opt.param_box.lo.real(), pw, nb),
                  index(c.imag(), opt.param_box.lo.imag(), ph, nb)}];
    if (a.cells.empty()) a.cells.assign(static_cast<std::size_t>(nc) * nc, 0.0);
    a.mass += s.mass;
    a.moment += s.mass * c;
    const int cx = index(s.z.real(), opt.base_box.lo.real(), cell, nc);
    const int cy = index(s.z.imag(), opt.base_box.lo.imag(), cell, nc);
    a.cells[static_cast<std::size_t>(cx) * nc + cy] += s.mass;
  }

  Disintegration dis;
  dis.param_box = opt.param_box;
  dis.base_box = opt.base_box;
  dis.bins_per_axis = nb;
  dis.base_cells = nc;
  const Box base_box = opt.base_box;
  for (auto& [key, a] : acc) {
    Bin bin;
    bin.ix = key.first;
    bin.iy = key.second;
    bin.mass = a.mass;
    bin.alpha = a.mass > 0.0 ? a.moment / a.mass : Complex{};
    bin.histogram = std::move(a.cells);
    const double norm = a.mass > 0.0 ? 1.0 / (a.mass * cell * cell) : 0.0;
    for (double& v : bin.histogram) v *= norm;
    bin.sigma = [hist = bin.histogram, base_box, cell, nc, index](Complex z) {
      if (!base_box.contains(z)) return 0.0;
      const int cx = index(z.real(), base_box.lo.real(), cell, nc);
      const int cy = index(z.imag(), base_box.lo.imag(), cell, nc);
      return hist[static_cast<std::size_t>(cx) * nc + cy];
    };
    dis.bins.push_back(std::move(bin));
  }
  return dis;
}

Disintegration uniform_disintegration(const DirectedCurrent& T, Complex z0, double radius) {
  return exact_disintegration(T, z0, radius, 0.0);
}

Disintegration tilted_disintegration(const DirectedCurrent& T, Complex z0, double radius,
                                     double kappa) {
  return exact_disintegration(T, z0, radius, kappa);
}

std::vector<ReconstructionRow> reconstruct_and_compare(const DirectedCurrent& T,
                                                       const Disintegration& dis,
                                                       const std::vector<Form11>& forms,
                                                       const LeafFamily& fam, const Quadrature& quad,
                                                       int cell_order) {
  std::vector<ReconstructionRow> rows;
  if (forms.empty()) return rows;
  const Quadrature base =
      Quadrature::composite(std::max(dis.base_cells, 1), cell_order, box_square(dis.base_box));
  for (const Form11& omega : forms) {
    ReconstructionRow row;
    row.form_id = omega.id;
    row.direct = current_pair(T, omega, fam, quad);
    for (const Bin& bin : dis.bins) {
      const Complex inner = sigma_integral(bin, base, [&](Complex z) {
        return in_support(omega.support, z) ? omega_on_v(omega, fam, bin.alpha, z) : Complex{};
      });
      row.reconstructed += bin.mass * kMinusTwoI * inner;
    }
    const double diff = std::abs(row.direct - row.reconstructed);
    const double scale = std::abs(row.direct);
    row.residual = scale > 0.0 ? diff / scale : diff;
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex d_form_density(const Form01& phi, const LeafFamily& fam, Complex c, Complex z) {
  const Complex s = fam.slope(c, z);
  const Complex w = fam.value(c, z);
  return eval(phi.dphi1_dz, z, w) + s * eval(phi.dphi1_dw, z, w) +
         std::conj(s) * (eval(phi.dphi2_dz, z, w) + s * eval(phi.dphi2_dw, z, w));
}

double closedness_residual(const Disintegration& dis, const LeafFamily& fam,
                           const std::vector<Form01>& forms,
                           const std::function<double(Complex)>& g, int order) {
  if (forms.empty() || dis.bins.empty()) return 0.0;
  double worst = 0.0;
  for (const Form01& phi : forms) {
    const Quadrature base = Quadrature::for_disc(order, phi.support.center, phi.support.radius);
    Complex total;
    for (const Bin& bin : dis.bins) {
      const double weight = g(bin.alpha);
      if (weight == 0.0) continue;
      const Complex inner = sigma_integral(bin, base, [&](Complex z) {
        return in_support(phi.support, z) ? d_form_density(phi, fam, bin.alpha, z) : Complex{};
      });
      total += weight * bin.mass * kMinusTwoI * inner;
    }
    worst = std::max(worst, std::abs(total));
  }
  return worst;
}

}  // namespace lam
