#include "lamination/counterexamples.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "lamination/errors.hpp"
#include "lamination/quadrature.hpp"
#include "lamination/random.hpp"
#include "lamination/smoothing.hpp"

namespace lam {

double cubic::project(double x, double y) { return x - std::cbrt(y); }

curve3::Point curve3::leaf(Complex t, Complex s) {
  const Complex d = s - t;
  return {s, d * d, d * d * d};
}

curve3::Point curve3::tangent(Complex t, Complex s) {
  const Complex d = s - t;
  return {Complex(1.0), 2.0 * d, 3.0 * d * d};
}

Complex curve3::project(const Point& p) {
  if (p[1] == Complex{}) return p[0];
  return p[0] - p[2] / p[1];
}

TangencyReport cubic_tangency_check(const std::vector<double>& real_ts,
                                    const std::vector<Complex>& complex_ts) {
  TangencyReport rep;
  for (const double t : real_ts) {
    rep.max_value = std::max(rep.max_value, std::abs(cubic::leaf(t, t)));
    rep.max_slope = std::max(rep.max_slope, std::abs(cubic::slope(t, t)));
  }
  for (const Complex t : complex_ts) {
    const auto p = curve3::leaf(t, t);
    const auto v = curve3::tangent(t, t);
    rep.max_value = std::max({rep.max_value, std::abs(p[0] - t), std::abs(p[1]), std::abs(p[2])});
    rep.max_slope = std::max({rep.max_slope, std::abs(v[0] - 1.0), std::abs(v[1]), std::abs(v[2])});
  }
  rep.pass = rep.max_value == 0.0 && rep.max_slope == 0.0;
  return rep;
}

double curve3_roundtrip_error(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed, 0xc3);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = rng.at(i);
    const Complex t = r.in_disc(1.0);
    const Complex s = t + r.in_disc(1.0);
    worst = std::max(worst, std::abs(curve3::project(curve3::leaf(t, s)) - t));
  }
  return worst;
}

double axis_weak_directedness(double lo, double hi, const std::function<double(double)>& g,
                              AxisForm form, int order) {
  const GaussRule rule = gauss_legendre(order);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = mid + half * rule.nodes[i];
    // Only the dx component of the form survives on the axis.
    const double dx_part = form == AxisForm::Dx ? 1.0 : -cubic::slope(cubic::project(x, 0.0), x);
    acc += rule.weights[i] * half * g(x) * dx_part;
  }
  return std::abs(acc);
}

double axis_weak_directedness_c3(double radius, const std::function<Complex(Complex)>& g,
                                 int order) {
  const Quadrature quad = Quadrature::for_disc(order, 0.0, radius);
  Complex first, second;
  for (std::size_t i = 0; i < quad.points().size(); ++i) {
    const Complex z = quad.points()[i];
    if (std::abs(z) > radius) continue;
    const Complex d = z - curve3::project({z, 0.0, 0.0});
    const Complex gz = quad.weights()[i] * g(z);
    first += gz * (-2.0 * d);
    second += gz * (-3.0 * d * d);
  }
  return std::abs(first) + std::abs(second);
}

double witness_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double axis_bump_pairing(double epsilon) {
  // y = 0 on the axis, so the integrand is bump(0) on [-1, 1].
  const GaussRule rule = gauss_legendre(8);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * witness_bump(0.0 / epsilon);
  return acc;
}

double leaf_bump_pairing(double t, double epsilon) {
  // u = (x - t) / eps^{1/3} turns bump((x - t)^3 / eps) into bump(u^3).
  // Composite rule: the bump is flat to all orders at u = +-1.
  const double scale = std::cbrt(epsilon);
  const double lo = std::max(-1.0, (-1.0 - t) / scale);
  const double hi = std::min(1.0, (1.0 - t) / scale);
  if (!(hi > lo)) return 0.0;
  const GaussRule rule = gauss_legendre(32);
  constexpr int kPanels = 24;
  double acc = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = lo + (hi - lo) * p / kPanels;
    const double b = lo + (hi - lo) * (p + 1) / kPanels;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = mid + half * rule.nodes[i];
      acc += half * rule.weights[i] * witness_bump(u * u * u);
    }
  }
  return scale * acc;
}

WitnessReport non_directedness_witness(double mass_bound, const std::vector<double>& eps_list) {
  if (eps_list.size() < 2) throw PreconditionError("witness needs at least two epsilons");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw PreconditionError("witness epsilons must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw PreconditionError("witness epsilons must be decreasing");
  }
  if (!(mass_bound > 0.0)) throw PreconditionError("mass bound must be positive");

  WitnessReport rep;
  rep.mass_bound = mass_bound;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(eps_list.size());
  for (const double eps : eps_list) {
    WitnessRow row{eps, axis_bump_pairing(eps), leaf_bump_pairing(0.0, eps), 0.0};
    const double lx = std::log(eps), ly = std::log(row.leaf_pairing);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    rep.rows.push_back(row);
  }
  rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  for (auto& row : rep.rows) row.exponent_fit = rep.exponent;

  rep.leaf_constant = leaf_bump_pairing(0.0, 1e-12) / std::cbrt(1e-12);
  const double axis = rep.rows.front().axis_pairing;
  rep.axis_constant = true;
  for (const auto& row : rep.rows)
    rep.axis_constant = rep.axis_constant && std::abs(row.axis_pairing / axis - 1.0) <= 1e-10;
  const double ratio = axis / (mass_bound * rep.leaf_constant);
  rep.contradiction_epsilon = ratio * ratio * ratio;
  return rep;
}

double leaf_coordinate(double x, double y) { return cubic::project(x, y); }

ObstructionReport approx_obstruction(const C1Candidate& psi, const ObstructionOptions& opt) {
  if (!psi.value) throw PreconditionError("obstruction candidate has no value function");
  ObstructionReport rep;
  rep.candidate_id = psi.id;
  if (!psi.gradient)
    rep.warning = fmt::format("{}: no analytic gradient, using central differences", psi.id);

  auto gradient = [&](double x, double y) -> std::array<double, 2> {
    if (psi.gradient) return psi.gradient(x, y);
    constexpr double h = 1e-6;
    return {(psi.value(x + h, y) - psi.value(x - h, y)) / (2.0 * h),
            (psi.value(x, y + h) - psi.value(x, y - h)) / (2.0 * h)};
  };
  auto visit = [&](double x, double y) {
    const double v = psi.value(x, y);
    const auto g = gradient(x, y);
    const double t = cubic::project(x, y);
    rep.eta = std::max(rep.eta, std::abs(v - leaf_coordinate(x, y)));
    rep.eps = std::max(rep.eps, std::abs(g[0] + g[1] * cubic::slope(t, x)));
  };
  for (int i = 0; i < opt.grid; ++i) {
    const double x = opt.x_lo + (opt.x_hi - opt.x_lo) * i / (opt.grid - 1);
    for (int j = 0; j < opt.grid; ++j) visit(x, opt.y_lo + (opt.y_hi - opt.y_lo) * j / (opt.grid - 1));
  }
  for (int i = 0; i < opt.axis_row; ++i)
    visit(opt.x_lo + (opt.x_hi - opt.x_lo) * i / (opt.axis_row - 1), 0.0);
  rep.combined = 2.0 * rep.eta + rep.eps;
  rep.pass = rep.combined >= 1.0 - opt.tol;
  return rep;
}

C1Candidate naive_smoothing_candidate(double delta) {
  if (!(delta > 0.0)) throw PreconditionError("naive smoothing needs delta > 0");
  auto jet = [delta](double x0, double y0) {
    const Jet x = Jet::variable(x0, kX1);
    const Jet y = Jet::variable(y0, kX2);
    const int j = static_cast<int>(std::floor(cubic::project(x0, y0) / delta));
    const Jet dj = x - j * delta;
    const Jet dj1 = x - (j + 1) * delta;
    const Jet yj = dj * dj * dj;
    const Jet yj1 = dj1 * dj1 * dj1;
    return Jet(j * delta) + Jet(delta) * CutoffChi::value((yj - y) / (yj - yj1));
  };
  return {fmt::format("naive_smoothing_{}", delta),
          [jet](double x, double y) { return jet(x, y).v; },
          [jet](double x, double y) {
            const Jet h = jet(x, y);
            return std::array<double, 2>{h.d[kX1], h.d[kX2]};
          }};
}

namespace {

double witness_bump_derivative(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return witness_bump(s) * (-2.0 * s / (q * q));
}

// int_{-r}^{r} cbrt(y - v) k(v) dv, split at the cusp v = y.
double cusp_integral(double y, double r, const std::function<double(double)>& k) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [&](double v) { return std::cbrt(y - v) * k(v); };
  if (y > -r && y < r) return Rule::integrate(f, -r, y, 12, 1e-13) + Rule::integrate(f, y, r, 12, 1e-13);
  return Rule::integrate(f, -r, r, 12, 1e-13);
}

}  // namespace

C1Candidate mollified_candidate(double radius) {
  if (!(radius > 0.0)) throw PreconditionError("mollification radius must be positive");
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double norm = radius * Rule::integrate(witness_bump, -1.0, 1.0, 12, 1e-14);
  // x is harmonic for the symmetric kernel, so only the cube root is smoothed
  // and the candidate depends on y alone; sampled rows repeat y, so memoize.
  struct Smoothed {
    double radius, norm;
    std::mutex lock;
    std::map<double, std::array<double, 2>> cache;

    std::array<double, 2> at(double y) {
      {
        const std::scoped_lock guard(lock);
        if (auto it = cache.find(y); it != cache.end()) return it->second;
      }
      const double r = radius, n = norm;
      const std::array<double, 2> v{
          cusp_integral(y, r, [r, n](double u) { return witness_bump(u / r) / n; }),
          cusp_integral(y, r, [r, n](double u) { return witness_bump_derivative(u / r) / (r * n); })};
      const std::scoped_lock guard(lock);
      cache.emplace(y, v);
      return v;
    }
  };
  auto smoothed = std::make_shared<Smoothed>();
  smoothed->radius = radius;
  smoothed->norm = norm;
  return {fmt::format("mollified_{}", radius),
          [smoothed](double x, double y) { return x - smoothed->at(y)[0]; },
          [smoothed](double, double y) { return std::array<double, 2>{1.0, -smoothed->at(y)[1]}; }};
}

namespace {

// P_0..P_n and their derivatives at s.
void legendre(int n, double s, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(n + 1, 0.0);
  dp.assign(n + 1, 0.0);
  p[0] = 1.0;
  if (n >= 1) {
    p[1] = s;
    dp[1] = 1.0;
  }
  for (int k = 1; k < n; ++k) {
    p[k + 1] = ((2.0 * k + 1.0) * s * p[k] - k * p[k - 1]) / (k + 1.0);
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  }
}

}  // namespace

C1Candidate polynomial_candidate(int degree, const ObstructionOptions& box) {
  if (degree < 0) throw PreconditionError("polynomial degree must be nonnegative");
  std::vector<std::pair<int, int>> terms;
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) terms.emplace_back(i, j);

  const double sx = 2.0 / (box.x_hi - box.x_lo);
  const double sy = 2.0 / (box.y_hi - box.y_lo);
  constexpr int kFit = 81;
  Eigen::MatrixXd A(kFit * kFit, static_cast<Eigen::Index>(terms.size()));
  Eigen::VectorXd b(kFit * kFit);
  std::vector<double> px, dpx, py, dpy;
  for (int a = 0; a < kFit; ++a) {
    const double x = box.x_lo + (box.x_hi - box.x_lo) * a / (kFit - 1);
    legendre(degree, sx * (x - box.x_lo) - 1.0, px, dpx);
    for (int c = 0; c < kFit; ++c) {
      const double y = box.y_lo + (box.y_hi - box.y_lo) * c / (kFit - 1);
      legendre(degree, sy * (y - box.y_lo) - 1.0, py, dpy);
      const int row = a * kFit + c;
      for (std::size_t m = 0; m < terms.size(); ++m)
        A(row, static_cast<Eigen::Index>(m)) = px[terms[m].first] * py[terms[m].second];
      b(row) = leaf_coordinate(x, y);
    }
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);

  struct Poly {
    std::vector<std::pair<int, int>> terms;
    std::vector<double> coef;
    int degree;
    double x_lo, y_lo, sx, sy;

    std::array<double, 3> eval(double x, double y) const {
      std::vector<double> px, dpx, py, dpy;
      legendre(degree, sx * (x - x_lo) - 1.0, px, dpx);
      legendre(degree, sy * (y - y_lo) - 1.0, py, dpy);
      std::array<double, 3> out{};
      for (std::size_t m = 0; m < terms.size(); ++m) {
        const auto [i, j] = terms[m];
        out[0] += coef[m] * px[i] * py[j];
        out[1] += coef[m] * dpx[i] * sx * py[j];
        out[2] += coef[m] * px[i] * dpy[j] * sy;
      }
      return out;
    }
  };
  const Poly poly{terms, std::vector<double>(coef.data(), coef.data() + coef.size()), degree,
                  box.x_lo, box.y_lo, sx, sy};
  return {fmt::format("polyfit_{}", degree),
          [poly](double x, double y) { return poly.eval(x, y)[0]; },
          [poly](double x, double y) {
            const auto e = poly.eval(x, y);
            return std::array<double, 2>{e[1], e[2]};
          }};
}

std::vector<C1Candidate> obstruction_candidates() {
  std::vector<C1Candidate> out;
  for (const double delta : {0.2, 0.1, 0.05, 0.025}) out.push_back(naive_smoothing_candidate(delta));
  for (const double r : {0.05, 0.1, 0.2}) out.push_back(mollified_candidate(r));
  for (int d = 1; d <= 10; ++d) out.push_back(polynomial_candidate(d));
  return out;
}

}  // namespace lam
