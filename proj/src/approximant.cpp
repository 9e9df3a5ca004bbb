#include "lamination/approximant.hpp"

#include <cmath>

#include "lamination/errors.hpp"
#include "lamination/grid.hpp"

namespace lam {

const char* target_name(Target t) {
  switch (t) {
    case Target::RePi: return "re_pi";
    case Target::ImPi: return "im_pi";
    case Target::Composite: return "composite";
  }
  return "unknown";
}

PartiallySmoothFn target_function(const LeafFamily& fam, Target t, Complex center) {
  const ChartLamination lam(fam, center);
  auto label = [lam](Complex z, Complex w) { return lam.project(z, w); };
  auto zero = [](Complex, Complex) { return 0.0; };
  switch (t) {
    case Target::RePi:
      return {"re_pi", [label](Complex z, Complex w) { return label(z, w).real(); }, zero, zero};
    case Target::ImPi:
      return {"im_pi", [label](Complex z, Complex w) { return label(z, w).imag(); }, zero, zero};
    case Target::Composite:
      return {"composite",
              [label](Complex z, Complex w) {
                const Complex u = label(z, w);
                return std::sin(2.0 * u.real()) + z.real() * u.imag() + z.imag() * z.imag();
              },
              [label](Complex z, Complex w) { return label(z, w).imag(); },
              [](Complex z, Complex) { return 2.0 * z.imag(); }};
  }
  throw ConfigError("unknown target");
}

double leafwise_derivative(const Approximant& psi, const LeafFamily& fam, Complex c, Complex z,
                           Axis axis) {
  const Gradient g = psi.gradient(z, fam.value(c, z));
  const Complex s = fam.slope(c, z);
  if (axis == Axis::X1) return g[kX1] + g[kY1] * s.real() + g[kY2] * s.imag();
  return g[kX2] - g[kY1] * s.imag() + g[kY2] * s.real();
}

double leafwise_derivative(const std::function<double(Complex, Complex)>& fn,
                           const LeafFamily& fam, Complex c, Complex z, Axis axis, double h) {
  const Complex dir = axis == Axis::X1 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
  while (h > 1e-12) {
    const Complex zp = z + h * dir;
    const Complex zm = z - h * dir;
    if (std::abs(zp) < 1.0 && std::abs(zm) < 1.0)
      return (fn(zp, fam.value(c, zp)) - fn(zm, fam.value(c, zm))) / (2.0 * h);
    h *= 0.5;
  }
  throw DomainError("leafwise derivative: base point too close to the boundary");
}

}  // namespace lam
