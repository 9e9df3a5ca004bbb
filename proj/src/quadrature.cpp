#include "lamination/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "lamination/errors.hpp"

namespace lam {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("gauss_legendre needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-type initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

bool Square::contains_disc(Complex c, double r) const {
  constexpr double kSlack = 1e-12;
  return std::abs(c.real() - center.real()) + r <= half_width + kSlack &&
         std::abs(c.imag() - center.imag()) + r <= half_width + kSlack;
}

Quadrature::Quadrature(int order, Square domain) : order_(order), domain_(domain) {
  if (!(domain.half_width > 0.0)) throw ConfigError("quadrature square needs positive size");
  const GaussRule g = gauss_legendre(order);
  const double h = domain.half_width;
  points_.reserve(static_cast<std::size_t>(order) * order);
  weights_.reserve(points_.capacity());
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) {
      points_.push_back(domain.center + Complex(h * g.nodes[i], h * g.nodes[j]));
      weights_.push_back(h * h * g.weights[i] * g.weights[j]);
    }
}

Quadrature Quadrature::for_disc(int order, Complex center, double radius) {
  return Quadrature(order, Square{center, radius});
}

Quadrature Quadrature::composite(int cells, int order, Square domain) {
  if (cells < 1) throw PreconditionError("composite quadrature needs at least one cell");
  const double h = domain.half_width / cells;
  const Complex corner = domain.center - Complex(domain.half_width, domain.half_width);
  std::vector<Complex> pts;
  std::vector<double> wts;
  for (int a = 0; a < cells; ++a)
    for (int b = 0; b < cells; ++b) {
      const Quadrature cell(order, Square{corner + Complex((2 * a + 1) * h, (2 * b + 1) * h), h});
      pts.insert(pts.end(), cell.points_.begin(), cell.points_.end());
      wts.insert(wts.end(), cell.weights_.begin(), cell.weights_.end());
    }
  return Quadrature(order, domain, std::move(pts), std::move(wts));
}

}  // namespace lam
