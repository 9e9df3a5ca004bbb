#pragma once

// Forward-mode derivatives with respect to the four real coordinates of a
// point (z, w) = (x1 + i x2, y1 + i y2) in C^2.  Every approximant in the
// toolkit evaluates through these types, so values and gradients come from
// a single code path.

#include <array>
#include <cmath>
#include <complex>

namespace lam {

using Complex = std::complex<double>;

inline constexpr int kX1 = 0;
inline constexpr int kX2 = 1;
inline constexpr int kY1 = 2;
inline constexpr int kY2 = 3;

using Gradient = std::array<double, 4>;

struct Jet {
  double v = 0.0;
  Gradient d{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
  Jet(double value, const Gradient& grad) : v(value), d(grad) {}

  static Jet variable(double value, int index) {
    Jet j(value);
    j.d[index] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < 4; ++i) d[i] += o.d[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < 4; ++i) d[i] -= o.d[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    for (int i = 0; i < 4; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (int i = 0; i < 4; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator-(Jet a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}

// Applies a scalar function with known value and derivative at a.v.
inline Jet chain(const Jet& a, double f, double fprime) {
  Jet r(f);
  for (int i = 0; i < 4; ++i) r.d[i] = fprime * a.d[i];
  return r;
}

inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v)); }
inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v)); }

// Complex number whose real and imaginary parts are jets.
struct CJet {
  Jet re;
  Jet im;

  CJet() = default;
  CJet(Jet r, Jet i) : re(std::move(r)), im(std::move(i)) {}
  CJet(Complex c) : re(c.real()), im(c.imag()) {}  // NOLINT

  Complex value() const { return {re.v, im.v}; }

  // Tangent of the complex value along coordinate k.
  Complex tangent(int k) const { return {re.d[k], im.d[k]}; }
};

inline CJet operator+(const CJet& a, const CJet& b) { return {a.re + b.re, a.im + b.im}; }
inline CJet operator-(const CJet& a, const CJet& b) { return {a.re - b.re, a.im - b.im}; }
inline CJet operator*(const CJet& a, const CJet& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CJet operator*(const CJet& a, const Jet& s) { return {a.re * s, a.im * s}; }
inline CJet operator/(const CJet& a, const CJet& b) {
  const Jet den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
inline CJet conj(const CJet& a) { return {a.re, -a.im}; }

// The coordinate functions z and w as jets.
inline CJet z_variable(Complex z) {
  return {Jet::variable(z.real(), kX1), Jet::variable(z.imag(), kX2)};
}
inline CJet w_variable(Complex w) {
  return {Jet::variable(w.real(), kY1), Jet::variable(w.imag(), kY2)};
}

// g(arg) for g holomorphic with g(arg) = value and g'(arg) = derivative.
inline CJet apply_holomorphic(const CJet& arg, Complex value, Complex derivative) {
  CJet r(value);
  for (int k = 0; k < 4; ++k) {
    const Complex t = derivative * arg.tangent(k);
    r.re.d[k] = t.real();
    r.im.d[k] = t.imag();
  }
  return r;
}

// g(z_arg, w_arg) for g holomorphic in both variables with the given partials.
inline CJet apply_holomorphic(const CJet& z_arg, const CJet& w_arg, Complex value, Complex dz,
                              Complex dw) {
  CJet r(value);
  for (int k = 0; k < 4; ++k) {
    const Complex t = dz * z_arg.tangent(k) + dw * w_arg.tangent(k);
    r.re.d[k] = t.real();
    r.im.d[k] = t.imag();
  }
  return r;
}

}  // namespace lam
