#pragma once

// Gauss-Legendre rules in one dimension and their tensor products on
// axis-aligned squares of the base plane.

#include <complex>
#include <utility>
#include <vector>

namespace lam {

using Complex = std::complex<double>;

struct GaussRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // positive, summing to 2
};

// n-point rule; exact for polynomials of degree <= 2n - 1.  Throws
// PreconditionError for n < 1.
GaussRule gauss_legendre(int n);

struct Square {
  Complex center;
  double half_width = 0.0;

  bool contains(Complex z) const {
    return std::abs(z.real() - center.real()) <= half_width &&
           std::abs(z.imag() - center.imag()) <= half_width;
  }
  bool contains_disc(Complex c, double r) const;
};

// Tensor-product rule of the given order per axis on a square.
class Quadrature {
 public:
  Quadrature(int order, Square domain);

  // Rule on the square circumscribing the disc.
  static Quadrature for_disc(int order, Complex center, double radius);

  // The square split into cells x cells sub-squares, each carrying a tensor
  // rule of the given order.
  static Quadrature composite(int cells, int order, Square domain);

  int order() const { return order_; }
  const Square& domain() const { return domain_; }
  const std::vector<Complex>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  template <class Fn>
  auto integrate(Fn&& fn) const {
    decltype(fn(points_.front())) acc{};
    for (std::size_t i = 0; i < points_.size(); ++i) acc += weights_[i] * fn(points_[i]);
    return acc;
  }

 private:
  Quadrature(int order, Square domain, std::vector<Complex> points, std::vector<double> weights)
      : order_(order), domain_(domain), points_(std::move(points)), weights_(std::move(weights)) {}

  int order_;
  Square domain_;
  std::vector<Complex> points_;
  std::vector<double> weights_;
};

}  // namespace lam
