#include "lamination/smoothing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lamination/errors.hpp"
#include "lamination/random.hpp"

namespace lam {

namespace {

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }
double smoothstep_derivative(double u) { return 6.0 * u * (1.0 - u); }

constexpr double kStripLow = -0.5;
constexpr double kStripHigh = 1.5;

int floor_index(double x, double delta) { return static_cast<int>(std::floor(x / delta)); }

struct HeightParts {
  Jet height;
  Jet y_hat2;
  Jet denominator;
};

HeightParts local_height_parts(const ChartLamination& lam, double delta, int j, int k,
                               const CJet& z, const CJet& w) {
  const CJet f00 = lam.value(Complex(j, k) * delta, z);
  const CJet f10 = lam.value(Complex(j + 1, k) * delta, z);
  const CJet f01 = lam.value(Complex(j, k + 1) * delta, z);
  const CJet f11 = lam.value(Complex(j + 1, k + 1) * delta, z);
  const CJet span = f10 - f00;
  const CJet wt = (w - f00) / span;
  const CJet a = (f01 - f00) / span;
  const CJet b = (f11 - f00) / span;

  // A_z and the apex-line parameter, all as jets in (x1, x2, y1, y2).
  const Jet ratio = a.re / a.im;
  const Jet yh1 = wt.re - wt.im * ratio;
  const Jet yh2 = wt.im / a.im;
  const Jet bh1 = b.re - b.im * ratio;
  const Jet bh2 = b.im / a.im;
  const Jet den = bh2 + yh2 * (bh1 - 1.0);
  const Jet t = yh1 * bh2 / den;
  return {Jet(j * delta) + Jet(delta) * CutoffChi::value(t), yh2, den};
}

ChartLamination chart_for(const LeafFamily& fam, const GridSpec& grid, Target target) {
  switch (target) {
    case Target::RePi: return {fam, grid.center, 1.0};
    case Target::ImPi: return {fam, grid.center, Complex(0.0, -1.0)};
    case Target::Composite: break;
  }
  throw ConfigError("leaf-constant approximant only targets Re pi or Im pi");
}

std::vector<Complex> disc_rings(Complex center, double radius, int rings, int angles) {
  std::vector<Complex> zs{center};
  for (int i = 1; i <= rings; ++i)
    for (int a = 0; a < angles; ++a)
      zs.push_back(center + std::polar(radius * i / rings * (1.0 - 1e-12),
                                       2.0 * std::numbers::pi * (a + 0.5) / angles));
  return zs;
}

// Adjacent grid leaves of the chart stay delta^2 apart over the chart disc.
double chart_min_gap_ratio(const ChartLamination& lam, const GridSpec& grid) {
  const int bound = grid.index_bound();
  const auto zs = disc_rings(grid.center, grid.t0, 2, 12);
  double worst = std::numeric_limits<double>::infinity();
  for (int j = -bound; j <= bound; ++j) {
    for (int k = -bound; k <= bound; ++k) {
      if (!grid.in_range(j, k)) continue;
      for (const Complex z : zs) {
        const double gap = std::abs(lam.value(grid.point(j, k), z) - lam.value(grid.point(j + 1, k), z));
        worst = std::min(worst, gap / (grid.delta * grid.delta));
      }
    }
  }
  return worst;
}

}  // namespace

double CutoffChi::value(double t) {
  if (t <= 0.25) return 0.0;
  if (t >= 0.75) return 1.0;
  return smoothstep(2.0 * t - 0.5);
}

double CutoffChi::derivative(double t) {
  if (t <= 0.25 || t >= 0.75) return 0.0;
  return 2.0 * smoothstep_derivative(2.0 * t - 0.5);
}

Jet CutoffChi::value(const Jet& t) { return chain(t, value(t.v), derivative(t.v)); }

double GlueRamp::value(double s) {
  const double u = (s + kGlueMargin) / (2.0 * kGlueMargin);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return smoothstep(u);
}

Jet GlueRamp::value(const Jet& s) {
  const double u = (s.v + kGlueMargin) / (2.0 * kGlueMargin);
  const double d = (u <= 0.0 || u >= 1.0) ? 0.0 : smoothstep_derivative(u) / (2.0 * kGlueMargin);
  return chain(s, value(s.v), d);
}

double BumpLambda::value(double t) const {
  const double x = t - j * delta;
  if (std::abs(x) >= delta) return 0.0;
  const double c = std::cos(std::numbers::pi * x / (2.0 * delta));
  return c * c;
}

double BumpLambda::derivative(double t) const {
  const double x = t - j * delta;
  if (std::abs(x) >= delta) return 0.0;
  return -(std::numbers::pi / (2.0 * delta)) * std::sin(std::numbers::pi * x / delta);
}

Jet BumpLambda::value(const Jet& t) const { return chain(t, value(t.v), derivative(t.v)); }

QuadFrame make_frame(Point2 a, Point2 b, int j, int k) {
  QuadFrame f;
  f.j = j;
  f.k = k;
  f.a = a;
  f.b = b;
  f.shear = {1.0, -a.y1 / a.y2, 0.0, 1.0 / a.y2};
  f.b_hat = f.apply(b);
  f.L = f.b_hat.y1 == 1.0 ? std::numeric_limits<double>::infinity()
                          : f.b_hat.y2 / (f.b_hat.y1 - 1.0);
  return f;
}

double QuadFrame::shear_norm() const {
  // Largest singular value of the 2x2 shear.
  const double p = shear[0], q = shear[1], r = shear[2], s = shear[3];
  const double t = p * p + q * q + r * r + s * s;
  const double det = p * s - q * r;
  return std::sqrt(0.5 * (t + std::sqrt(std::max(0.0, t * t - 4.0 * det * det))));
}

QuadFrame quad_frame(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z) {
  if (!grid.in_range(j, k))
    throw IndexError(fmt::format("grid cell ({}, {}) outside |c| <= 2R", j, k));
  const ChartLamination lam(fam, grid.center);
  const Complex f00 = lam.value(grid.point(j, k), z);
  const Complex span = lam.value(grid.point(j + 1, k), z) - f00;
  const Complex a = (lam.value(grid.point(j, k + 1), z) - f00) / span;
  const Complex b = (lam.value(grid.point(j + 1, k + 1), z) - f00) / span;
  return make_frame({a.real(), a.imag()}, {b.real(), b.imag()}, j, k);
}

double leaf_parameter(const QuadFrame& frame, Point2 y_hat) {
  const double den = frame.b_hat.y2 + y_hat.y2 * (frame.b_hat.y1 - 1.0);
  if (std::abs(den) <= 1e-14 * std::max(1.0, std::abs(frame.b_hat.y2)))
    throw DomainError("leaf parameter: point on the apex line");
  return y_hat.y1 * frame.b_hat.y2 / den;
}

Jet local_height(const ChartLamination& lam, double delta, int j, int k, const CJet& z,
                 const CJet& w) {
  const HeightParts p = local_height_parts(lam, delta, j, k, z, w);
  if (!(p.y_hat2.v >= kStripLow && p.y_hat2.v <= kStripHigh))
    throw DomainError(fmt::format("local height ({}, {}): point outside the extension strip", j, k));
  if (!(p.denominator.v > 0.0))
    throw DomainError(fmt::format("local height ({}, {}): apex reached", j, k));
  return p.height;
}

double local_height(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z,
                    Complex w) {
  if (!grid.in_range(j, k))
    throw IndexError(fmt::format("grid cell ({}, {}) outside |c| <= 2R", j, k));
  const ChartLamination lam(fam, grid.center);
  return local_height(lam, grid.delta, j, k, CJet(z), CJet(w)).v;
}

Jet glue_heights(const ChartLamination& lam, double delta, const CJet& z, const CJet& w) {
  const Complex u = lam.project(z.value(), w.value());
  const int j = floor_index(u.real(), delta);
  const int k = floor_index(u.imag(), delta);

  // Blend across the horizontal edge nearest to the point.
  int upper = k;
  CJet wt = normalized_w(lam, delta, j, k, z, w);
  if (wt.im.v >= 0.5) {
    upper = k + 1;
    wt = normalized_w(lam, delta, j, upper, z, w);
  }
  const Jet weight = GlueRamp::value(wt.im);
  if (weight.v == 1.0) return local_height(lam, delta, j, upper, z, w);
  if (weight.v == 0.0) return local_height(lam, delta, j, upper - 1, z, w);
  return weight * local_height(lam, delta, j, upper, z, w) +
         (Jet(1.0) - weight) * local_height(lam, delta, j, upper - 1, z, w);
}

double glue_heights(const LeafFamily& fam, const GridSpec& grid, Complex z, Complex w) {
  const ChartLamination lam(fam, grid.center);
  return glue_heights(lam, grid.delta, CJet(z), CJet(w)).v;
}

bool quadrilateral_contains(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z,
                            Complex w) {
  const ChartLamination lam(fam, grid.center);
  const std::array<Complex, 4> corners{
      lam.value(grid.point(j, k), z), lam.value(grid.point(j + 1, k), z),
      lam.value(grid.point(j + 1, k + 1), z), lam.value(grid.point(j, k + 1), z)};
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Complex e = corners[(i + 1) % 4] - corners[i];
    const Complex p = w - corners[i];
    const double cross = e.real() * p.imag() - e.imag() * p.real();
    const int s = cross > 0.0 ? 1 : (cross < 0.0 ? -1 : 0);
    if (s == 0) return false;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

Approximant leaf_constant_approximant(const LeafFamily& fam, Target target, const GridSpec& grid) {
  validate(grid);
  const ChartLamination lam = chart_for(fam, grid, target);
  const double gap = chart_min_gap_ratio(lam, grid);
  if (!(gap >= 1.0))
    throw ConfigError(fmt::format(
        "grid too coarse: adjacent grid leaves of {} come within {} delta^2 at delta = {}",
        fam.name(), gap, grid.delta));
  const double delta = grid.delta;
  const Complex rot = lam.rotation();
  Provenance prov{"leaf_constant", fam.name(), delta,
                  {{"target", target_name(target)},
                   {"t0", fmt::format("{}", grid.t0)},
                   {"R", fmt::format("{}", grid.R)},
                   {"chi", "smoothstep"},
                   {"glue_margin", fmt::format("{}", kGlueMargin)}}};
  return Approximant(
      [lam, delta, rot](Complex z, Complex w) {
        return glue_heights(lam, delta, z_variable(z), CJet(rot) * w_variable(w));
      },
      std::move(prov));
}

Approximant bump_interpolant(const LeafFamily& fam, const PartiallySmoothFn& phi,
                             const GridSpec& grid) {
  validate(grid);
  const ChartLamination lam(fam, grid.center);
  const double delta = grid.delta;
  Provenance prov{"bump_interpolant", fam.name(), delta,
                  {{"target", phi.name}, {"t0", fmt::format("{}", grid.t0)}}};
  return Approximant(
      [lam, delta, phi](Complex z, Complex w) {
        const CJet u = lam.project(z_variable(z), w_variable(w));
        const int j0 = floor_index(u.re.v, delta);
        const int k0 = floor_index(u.im.v, delta);
        Jet acc;
        for (int j = j0; j <= j0 + 1; ++j) {
          const Jet lj = BumpLambda{delta, j}.value(u.re);
          if (lj.v == 0.0 && lj.d == Gradient{}) continue;
          for (int k = k0; k <= k0 + 1; ++k) {
            const Jet lk = BumpLambda{delta, k}.value(u.im);
            if (lk.v == 0.0 && lk.d == Gradient{}) continue;
            const Complex leaf_w = lam.value(Complex(j, k) * delta, z);
            // psi_jk(z) = phi(z, f_jk(z)); its gradient is the leafwise one.
            const Jet node(phi.value(z, leaf_w),
                           {phi.leaf_dx1(z, leaf_w), phi.leaf_dx2(z, leaf_w), 0.0, 0.0});
            acc += node * lj * lk;
          }
        }
        return acc;
      },
      std::move(prov));
}

namespace {

struct PartitionWeights {
  double beta = 0.0;
  double dbeta_x1 = 0.0;
  double dbeta_x2 = 0.0;
};

PartitionWeights partition_bump(const ChartDisc& d, Complex z) {
  const Complex off = z - d.center;
  const double s = std::norm(off) / (d.radius * d.radius);
  if (s >= 1.0) return {};
  const double one_minus = 1.0 - s;
  // beta = (1 - s)^2, ds/dx = 2 off / r^2
  const double scale = -2.0 * one_minus * 2.0 / (d.radius * d.radius);
  return {one_minus * one_minus, scale * off.real(), scale * off.imag()};
}

}  // namespace

double epsilon_budget(double epsilon, int multiplicity, double gradient_bound) {
  return epsilon / (2.0 * (multiplicity * gradient_bound + 1.0));
}

PatchResult partition_patch(std::vector<LocalApproximant> locals, std::vector<ChartDisc> cover) {
  if (locals.empty()) throw ConfigError("partition patch: no local approximants");
  if (locals.size() != cover.size())
    throw ConfigError("partition patch: one cover disc per local approximant required");
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const auto& chart = locals[i].chart;
    if (!(cover[i].radius > 0.0) ||
        std::abs(cover[i].center - chart.center) + cover[i].radius > chart.radius + 1e-12)
      throw ConfigError(fmt::format("partition patch: cover disc {} not inside its chart", i));
  }

  // Sample the partition for gradient bounds and overlap multiplicity.
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (const auto& d : cover) {
    lo_x = std::min(lo_x, d.center.real() - d.radius);
    hi_x = std::max(hi_x, d.center.real() + d.radius);
    lo_y = std::min(lo_y, d.center.imag() - d.radius);
    hi_y = std::max(hi_y, d.center.imag() + d.radius);
  }
  const std::size_t m = cover.size();
  std::vector<double> bounds(m, 0.0);
  int multiplicity = 0;
  constexpr int kGrid = 161;
  std::vector<PartitionWeights> pw(m);
  for (int ix = 0; ix < kGrid; ++ix) {
    for (int iy = 0; iy < kGrid; ++iy) {
      const Complex z(lo_x + (hi_x - lo_x) * ix / (kGrid - 1), lo_y + (hi_y - lo_y) * iy / (kGrid - 1));
      double sum = 0.0, sx = 0.0, sy = 0.0;
      int active = 0;
      for (std::size_t i = 0; i < m; ++i) {
        pw[i] = partition_bump(cover[i], z);
        if (pw[i].beta > 0.0) ++active;
        sum += pw[i].beta;
        sx += pw[i].dbeta_x1;
        sy += pw[i].dbeta_x2;
      }
      if (sum <= 0.0) continue;
      multiplicity = std::max(multiplicity, active);
      for (std::size_t i = 0; i < m; ++i) {
        const double gx = (pw[i].dbeta_x1 * sum - pw[i].beta * sx) / (sum * sum);
        const double gy = (pw[i].dbeta_x2 * sum - pw[i].beta * sy) / (sum * sum);
        bounds[i] = std::max(bounds[i], std::hypot(gx, gy));
      }
    }
  }

  double max_eps = 0.0;
  for (const auto& l : locals) max_eps = std::max(max_eps, l.epsilon);
  const double max_c = *std::max_element(bounds.begin(), bounds.end());

  Provenance prov{"partition_patch", locals.front().approx.provenance().family,
                  locals.front().approx.provenance().delta,
                  {{"charts", fmt::format("{}", m)}, {"multiplicity", fmt::format("{}", multiplicity)}}};
  Approximant patched(
      [locals = std::move(locals), cover](Complex z, Complex w) {
        double sum = 0.0, sx = 0.0, sy = 0.0;
        std::vector<std::pair<std::size_t, PartitionWeights>> active;
        for (std::size_t i = 0; i < cover.size(); ++i) {
          const PartitionWeights p = partition_bump(cover[i], z);
          if (p.beta <= 0.0) continue;
          active.emplace_back(i, p);
          sum += p.beta;
          sx += p.dbeta_x1;
          sy += p.dbeta_x2;
        }
        if (active.empty())
          throw DomainError("partition patch: base point not covered by any chart");
        Jet acc;
        for (const auto& [i, p] : active) {
          const Jet weight(p.beta / sum, {(p.dbeta_x1 * sum - p.beta * sx) / (sum * sum),
                                          (p.dbeta_x2 * sum - p.beta * sy) / (sum * sum), 0.0, 0.0});
          acc += weight * locals[i].approx.jet(z, w);
        }
        return acc;
      },
      std::move(prov));

  PatchResult res{std::move(patched), std::move(bounds), multiplicity, max_eps, 0.0};
  res.error_bound = multiplicity * max_c * max_eps + max_eps;
  return res;
}

std::vector<ChartDisc> hexagonal_cover(double domain_radius, double chart_radius) {
  const double spacing = 0.9 * std::sqrt(3.0) * chart_radius;
  const int n = static_cast<int>(std::ceil((domain_radius + chart_radius) / spacing)) + 1;
  std::vector<ChartDisc> discs;
  for (int j = -n; j <= n; ++j) {
    for (int i = -2 * n; i <= 2 * n; ++i) {
      const Complex p(spacing * (i + 0.5 * j), spacing * j * std::sqrt(3.0) / 2.0);
      if (std::abs(p) <= domain_radius + chart_radius) discs.push_back({p, chart_radius});
    }
  }
  return discs;
}

PatchResult patched_approximant(const LeafFamily& fam, const PartiallySmoothFn& phi, double delta,
                                double domain_radius, double chart_radius, double R) {
  const auto cover = hexagonal_cover(domain_radius, chart_radius);
  std::vector<LocalApproximant> locals;
  locals.reserve(cover.size());
  for (std::size_t i = 0; i < cover.size(); ++i) {
    GridSpec grid{delta, chart_radius, R, cover[i].center};
    Approximant local = bump_interpolant(fam, phi, grid);
    const ErrorReport rep = error_report(local, phi, fam, grid, {2000, 17 + i});
    const double eps = std::max(rep.sup_err, rep.leaf_c1_err());
    locals.push_back({cover[i], std::move(local), eps});
  }
  return partition_patch(std::move(locals), cover);
}

ErrorReport error_report(const Approximant& psi, const PartiallySmoothFn& phi,
                         const LeafFamily& fam, const GridSpec& grid, const SampleSpec& samples) {
  ErrorReport rep;
  rep.delta = grid.delta;
  const CounterRng rng(samples.seed, 0xe22);
  for (std::size_t i = 0; i < samples.n; ++i) {
    CounterRng r = rng.at(i);
    const Complex z = r.in_disc(grid.t0, grid.center);
    const Complex c = r.in_disc(grid.R);
    const Complex w = fam.value(c, z);
    const Jet h = psi.jet(z, w);
    const Complex s = fam.slope(c, z);
    const double d1 = h.d[kX1] + h.d[kY1] * s.real() + h.d[kY2] * s.imag();
    const double d2 = h.d[kX2] - h.d[kY1] * s.imag() + h.d[kY2] * s.real();
    rep.sup_err = std::max(rep.sup_err, std::abs(h.v - phi.value(z, w)));
    rep.leaf_c1_err_x1 = std::max(rep.leaf_c1_err_x1, std::abs(d1 - phi.leaf_dx1(z, w)));
    rep.leaf_c1_err_x2 = std::max(rep.leaf_c1_err_x2, std::abs(d2 - phi.leaf_dx2(z, w)));
    ++rep.samples;
  }
  return rep;
}

double c1_model(double delta) { return delta * std::log(1.0 / (2.0 * delta * delta)); }

void SweepResult::write_csv(std::ostream& out) const {
  out << "delta,sup_err,leaf_c1_x1,leaf_c1_x2,fit_pred\n";
  for (const auto& row : rows)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", row.report.delta,
                       row.report.sup_err, row.report.leaf_c1_err_x1, row.report.leaf_c1_err_x2,
                       row.fit_pred);
}

Approximant build_approximant(const LeafFamily& fam, Target target, const GridSpec& grid) {
  if (target == Target::Composite)
    return bump_interpolant(fam, target_function(fam, target, grid.center), grid);
  return leaf_constant_approximant(fam, target, grid);
}

SweepResult convergence_sweep(const LeafFamily& fam, Target target,
                              const std::vector<double>& delta_list, const SweepOptions& opt) {
  SweepResult res;
  const PartiallySmoothFn phi = target_function(fam, target, opt.center);
  double num = 0.0, den = 0.0, max_err = 0.0;
  for (const double delta : delta_list) {
    const GridSpec grid{delta, opt.t0, opt.R, opt.center};
    const Approximant psi = build_approximant(fam, target, grid);
    SweepRow row{error_report(psi, phi, fam, grid, opt.samples), 0.0};
    const double m = c1_model(delta);
    num += row.report.leaf_c1_err() * m;
    den += m * m;
    max_err = std::max(max_err, row.report.leaf_c1_err());
    res.rows.push_back(row);
  }
  res.fit = den > 0.0 ? num / den : 0.0;
  double worst = 0.0;
  for (auto& row : res.rows) {
    row.fit_pred = res.fit * c1_model(row.report.delta);
    worst = std::max(worst, std::abs(row.report.leaf_c1_err() - row.fit_pred));
  }
  res.fit_residual = max_err > 1e-12 ? worst / max_err : 0.0;
  return res;
}

double measure_gradient_constant(const LeafFamily& fam, const GridSpec& grid, int base_points) {
  const ChartLamination lam(fam, grid.center);
  const double delta = grid.delta;
  const int bound = static_cast<int>(std::ceil(grid.R / delta));
  const int stride = std::max(1, bound / 10);
  auto zs = disc_rings(grid.center, grid.t0, 1, base_points);
  double worst = 0.0;
  for (int j = -bound; j <= bound; j += stride) {
    for (int k = -bound; k <= bound; k += stride) {
      if (std::abs(grid.point(j, k)) > grid.R) continue;
      for (const Complex z : zs) {
        const QuadFrame fr = quad_frame(fam, grid, j, k, z);
        for (int ix = 0; ix <= 20; ++ix) {
          for (int iy = 0; iy <= 20; ++iy) {
            const CJet y = w_variable({-0.25 + 1.5 * ix / 20.0, -0.25 + 1.5 * iy / 20.0});
            const Jet yh1 = y.re * fr.shear[0] + y.im * fr.shear[1];
            const Jet yh2 = y.im * fr.shear[3];
            const Jet t = yh1 * fr.b_hat.y2 / (Jet(fr.b_hat.y2) + yh2 * (fr.b_hat.y1 - 1.0));
            const Jet g = Jet(delta) * CutoffChi::value(t);
            worst = std::max(worst, std::hypot(g.d[kY1], g.d[kY2]) / delta);
          }
        }
      }
    }
  }
  (void)lam;
  return worst;
}

double measure_constant_band(const LeafFamily& fam, const GridSpec& grid, int base_points) {
  const double delta = grid.delta;
  const int bound = static_cast<int>(std::ceil(grid.R / delta));
  const int stride = std::max(1, bound / 10);
  auto zs = disc_rings(grid.center, grid.t0, 1, base_points);
  double band = std::numeric_limits<double>::infinity();
  constexpr int kDirections = 64;
  for (int j = -bound; j <= bound; j += stride) {
    for (int k = -bound; k <= bound; k += stride) {
      if (std::abs(grid.point(j, k)) > grid.R) continue;
      for (const Complex z : zs) {
        const QuadFrame fr = quad_frame(fam, grid, j, k, z);
        for (int d = 0; d < kDirections; ++d) {
          const Complex dir = std::polar(1.0, 2.0 * std::numbers::pi * d / kDirections);
          for (int s = 1; s <= 512; ++s) {
            const double r = s / 512.0;
            if (r >= band) break;
            const Point2 yh = fr.apply({r * dir.real(), r * dir.imag()});
            if (CutoffChi::value(leaf_parameter(fr, yh)) > 0.0) {
              band = r - 1.0 / 512.0;
              break;
            }
          }
        }
      }
    }
  }
  return band;
}

}  // namespace lam
