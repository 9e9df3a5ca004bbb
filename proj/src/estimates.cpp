#include "lamination/estimates.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lamination/errors.hpp"
#include "lamination/grid.hpp"
#include "lamination/parallel.hpp"

namespace lam {

namespace {

constexpr double kRelTol = 1e-12;

bool within(double lhs, double rhs) { return lhs <= rhs + kRelTol * std::abs(rhs); }

// Expanded complex multiply, without the library's NaN recovery.
Complex horner(const std::vector<Complex>& coef, Complex z) {
  double re = 0.0, im = 0.0;
  const double zr = z.real(), zi = z.imag();
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) {
    const double t = re * zr - im * zi + it->real();
    im = re * zi + im * zr + it->imag();
    re = t;
  }
  return {re, im};
}

const std::vector<Complex>& unit_ring(int points) {
  static const std::vector<Complex> kRing1024 = [] {
    std::vector<Complex> zs;
    for (int i = 0; i < 1024; ++i) zs.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (i + 0.5) / 1024));
    return zs;
  }();
  if (points == 1024) return kRing1024;
  thread_local std::vector<Complex> other;
  other.clear();
  for (int i = 0; i < points; ++i)
    other.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (i + 0.5) / points));
  return other;
}

std::vector<Complex> ring(double radius, int points) {
  if (radius == 0.0) return {Complex{}};
  std::vector<Complex> zs = unit_ring(points);
  for (auto& z : zs) z *= radius;
  return zs;
}

}  // namespace

NonvanishingSample::NonvanishingSample(std::vector<Complex> u_coefficients,
                                       double validity_radius)
    : coef_(std::move(u_coefficients)), radius_(validity_radius) {
  if (coef_.empty()) coef_.push_back(-1.0);
}

NonvanishingSample NonvanishingSample::random(CounterRng& rng, int max_degree) {
  const int degree = static_cast<int>(rng.uniform() * (max_degree + 1));
  std::vector<Complex> v(degree + 1);
  for (int k = 0; k <= degree; ++k) v[k] = Complex(rng.normal(), rng.normal());

  double sup = 0.0;
  for (const Complex z : unit_ring(1024)) sup = std::max(sup, std::abs(horner(v, z)));
  const double target = 0.99 * rng.uniform();
  for (auto& x : v) x *= target / sup;

  const double s = std::pow(10.0, rng.uniform(-3.0, std::log10(20.0)));
  std::vector<Complex> u(degree + 1);
  for (int k = 0; k <= degree; ++k) u[k] = -s * v[k];
  u[0] -= s;
  return NonvanishingSample(std::move(u));
}

Complex NonvanishingSample::exponent(Complex z) const { return horner(coef_, z); }

Complex NonvanishingSample::exponent_derivative(Complex z) const {
  Complex acc = 0.0;
  for (std::size_t k = coef_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coef_[k];
  return acc;
}

double NonvanishingSample::max_real_exponent_on_boundary(int points) const {
  double m = -std::numeric_limits<double>::infinity();
  const double r = 0.999 * radius_;
  for (const Complex z : unit_ring(points)) m = std::max(m, exponent(r * z).real());
  return m;
}

BoundCheck schwarz_log_bound(const NonvanishingSample& f) {
  if (!(f.max_real_exponent_on_boundary() < 0.0))
    throw PreconditionError("nonvanishing sample: Re u >= 0 on the disc, so |f| < 1 fails");
  const double f0 = std::abs(f.value(0.0));
  BoundCheck r;
  r.lhs = std::abs(f.derivative(0.0));
  r.rhs = 2.0 * f0 * std::log(1.0 / f0);
  r.holds = within(r.lhs, r.rhs);
  return r;
}

double sup_leaf_difference(const LeafFamily& fam, Complex c, Complex c2) {
  const double d = std::abs(c - c2);
  switch (fam.kind()) {
    case FamilyKind::Product: return d;
    case FamilyKind::Shear: return d * (1.0 + std::abs(fam.a()));
    case FamilyKind::Exp: return d * std::exp(std::abs(fam.lam()));
    case FamilyKind::Nonlinear: return d * (1.0 + fam.eps() * std::abs(c + c2));
  }
  return d;
}

BoundCheck pair_slope_bound(const LeafFamily& fam, Complex c, Complex c2, Complex z) {
  if (!(std::abs(z) < 0.5)) throw PreconditionError("pair slope bound needs |z| < 1/2");
  if (c == c2) throw PreconditionError("pair slope bound needs distinct leaves");
  if (!(sup_leaf_difference(fam, c, c2) < 1.0))
    throw PreconditionError("pair slope bound needs sup |f_c - f_c2| < 1 on the disc");
  const double d = std::abs(fam.value(c, z) - fam.value(c2, z));
  BoundCheck r;
  r.lhs = std::abs(fam.slope(c, z) - fam.slope(c2, z));
  r.rhs = 4.0 * d * std::log(1.0 / d);
  r.holds = within(r.lhs, r.rhs);
  return r;
}

double t0_cap() { return 0.25 * std::numbers::ln2; }

namespace {

BatteryResult merge(const std::vector<BatteryResult>& parts) {
  BatteryResult total;
  for (const auto& p : parts) {
    total.samples += p.samples;
    total.violations += p.violations;
    total.skipped += p.skipped;
    total.worst_ratio = std::max(total.worst_ratio, p.worst_ratio);
  }
  return total;
}

void record(BatteryResult& acc, const BoundCheck& b) {
  ++acc.samples;
  if (!b.holds) ++acc.violations;
  if (b.rhs > 0.0) acc.worst_ratio = std::max(acc.worst_ratio, b.lhs / b.rhs);
}

}  // namespace

BatteryResult schwarz_battery(std::size_t n, std::uint64_t seed, unsigned jobs) {
  const CounterRng rng(seed, 0x5c4);
  const std::size_t chunks = 64;
  std::vector<BatteryResult> parts(chunks);
  parallel_chunks(n, chunks, jobs, [&](std::size_t b, std::size_t e, std::size_t c) {
    for (std::size_t i = b; i < e; ++i) {
      CounterRng r = rng.at(i);
      record(parts[c], schwarz_log_bound(NonvanishingSample::random(r)));
    }
  });
  return merge(parts);
}

BatteryResult corollary_battery(const LeafFamily& fam, std::size_t n, std::uint64_t seed,
                                unsigned jobs) {
  const CounterRng rng(seed, 0xc02);
  const double climit = fam.param_limit();
  const std::size_t chunks = 64;
  std::vector<BatteryResult> parts(chunks);
  parallel_chunks(n, chunks, jobs, [&](std::size_t b, std::size_t e, std::size_t ch) {
    for (std::size_t i = b; i < e; ++i) {
      CounterRng r = rng.at(i);
      const Complex c = r.in_disc(climit);
      const Complex step = std::polar(std::pow(10.0, r.uniform(-8.0, 0.0)),
                                      2.0 * std::numbers::pi * r.uniform());
      Complex c2 = c + step;
      if (std::abs(c2) > climit) c2 = c - step;
      const Complex z = r.in_disc(0.5 * (1.0 - 1e-12));
      if (std::abs(c2) > climit || sup_leaf_difference(fam, c, c2) >= 1.0) {
        ++parts[ch].skipped;
        continue;
      }
      record(parts[ch], pair_slope_bound(fam, c, c2, z));
    }
  });
  return merge(parts);
}

double delta0_search(const LeafFamily& fam, double R, std::size_t samples_per_level,
                     std::uint64_t seed) {
  const double climit = 2.0 * R;
  const CounterRng rng(seed, 0xde1);
  for (int level = 0; level <= 20; ++level) {
    const double d0 = std::ldexp(1.0, -level);
    bool ok = true;
    for (std::size_t i = 0; i < samples_per_level && ok; ++i) {
      CounterRng r = rng.at(i);
      const bool edge = i % 4 == 0;
      const Complex c = r.in_disc(climit);
      const double radius = edge ? d0 * (1.0 - 1e-9) : d0 * std::sqrt(r.uniform());
      const Complex step = std::polar(radius, 2.0 * std::numbers::pi * r.uniform());
      Complex c2 = c + step;
      if (std::abs(c2) > climit) c2 = c - step;
      if (std::abs(c2) > climit || c2 == c) continue;
      const Complex z = edge ? std::polar(0.5, 2.0 * std::numbers::pi * r.uniform())
                             : r.in_disc(0.5);
      const double d = std::abs(fam.value(c2, z) - fam.value(c, z));
      const double lhs = std::abs(fam.slope(c2, z) - fam.slope(c, z));
      const double rhs = 4.0 * d * std::log(1.0 / d);
      ok = within(lhs, rhs);
    }
    if (ok) return d0;
  }
  throw ConfigError(fmt::format("delta0 search for {}: no level down to 2^-20 passes", fam.name()));
}

double max_drift(const LeafFamily& fam, double delta, int N, double R, double t) {
  GridSpec grid;
  grid.delta = delta;
  grid.R = R;
  const int bound = grid.index_bound();
  const int span = N - 1;

  std::vector<Complex> zs = ring(t * (1.0 - 1e-12), 32);
  for (const Complex z : ring(0.5 * t, 16)) zs.push_back(z);
  zs.push_back(0.0);

  const int width = 2 * span + 1;
  std::vector<Complex> f(width * width);
  double worst = 0.0;
  for (int j = -bound; j <= bound; ++j) {
    for (int k = -bound; k <= bound; ++k) {
      if (!grid.in_range(j, k)) continue;
      for (const Complex z : zs) {
        for (int l = -span; l <= span; ++l)
          for (int m = -span; m <= span; ++m)
            f[(l + span) * width + (m + span)] = fam.value(grid.point(j + l, k + m), z);
        const Complex f00 = f[span * width + span];
        const Complex den = fam.value(grid.point(j + 1, k), z) - f00;
        for (int l = -span; l <= span; ++l) {
          for (int m = -span; m <= span; ++m) {
            const Complex wt = (f[(l + span) * width + (m + span)] - f00) / den;
            worst = std::max(worst, std::abs(wt - Complex(l, m)));
          }
        }
      }
    }
  }
  return worst;
}

double compute_t0(const LeafFamily& fam, const std::vector<double>& delta_list, int N, double R) {
  if (N < 2) throw PreconditionError("compute_t0 needs N >= 2");
  if (delta_list.empty()) throw PreconditionError("compute_t0 needs at least one delta");
  for (int level = 0; level <= 20; ++level) {
    const double t = std::ldexp(t0_cap(), -level);
    bool ok = true;
    for (const double delta : delta_list) {
      if (!(max_drift(fam, delta, N, R, t) < 0.1)) {
        ok = false;
        break;
      }
    }
    if (ok) return t;
  }
  throw ConfigError(fmt::format("t0 search for {}: drift stays above 1/10", fam.name()));
}

SeparationReport separation_check(const LeafFamily& fam, double delta, double t0, double R) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("separation check needs 0 < delta < 1");
  if (!(t0 > 0.0)) throw PreconditionError("separation check needs t0 > 0");
  GridSpec grid;
  grid.delta = delta;
  grid.R = R;
  const int bound = grid.index_bound();

  std::vector<Complex> zs;
  for (int i = 0; i <= 4; ++i)
    for (const Complex z : ring(t0 * i / 4.0, 24)) zs.push_back(z);

  SeparationReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.min_sharp_margin = std::numeric_limits<double>::infinity();
  for (int j = -bound; j <= bound; ++j) {
    for (int k = -bound; k <= bound; ++k) {
      if (!grid.in_range(j, k)) continue;
      for (const Complex z : zs) {
        const double gap =
            std::abs(fam.value(grid.point(j, k), z) - fam.value(grid.point(j + 1, k), z));
        rep.min_ratio = std::min(rep.min_ratio, gap / (delta * delta));
        const double sharp = std::pow(delta, std::exp(4.0 * std::abs(z)));
        rep.min_sharp_margin = std::min(rep.min_sharp_margin, gap / sharp);
      }
    }
  }
  rep.pass = rep.min_ratio >= 1.0 && rep.min_sharp_margin >= 1.0 - kRelTol;
  return rep;
}

}  // namespace lam
