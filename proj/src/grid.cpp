#include "lamination/grid.hpp"

#include <fmt/format.h>

#include "lamination/errors.hpp"

namespace lam {

void validate(const GridSpec& grid) {
  if (!(grid.delta > 0.0)) throw ConfigError("grid: delta must be positive");
  if (!(grid.t0 > 0.0)) throw ConfigError("grid: t0 must be positive");
  if (!(grid.R > 0.0)) throw ConfigError("grid: R must be positive");
  if (std::abs(grid.center) + grid.t0 >= 1.0)
    throw ConfigError(fmt::format("grid: chart disc |z - p| <= {} leaves the unit disc", grid.t0));
}

ChartLamination::ChartLamination(const LeafFamily& fam, Complex center, Complex rotation)
    : fam_(fam), center_(center), rot_(rotation), identity_(center == 0.0 && rotation == 1.0) {}

Complex ChartLamination::family_parameter(Complex u) const {
  if (identity_) return u;
  return fam_.project(center_, u / rot_);
}

Complex ChartLamination::value(Complex u, Complex z) const {
  if (identity_) return fam_.value(u, z);
  return rot_ * fam_.value(family_parameter(u), z);
}

CJet ChartLamination::value(Complex u, const CJet& z) const {
  if (identity_) return fam_.value(u, z);
  const Complex c = family_parameter(u);
  return apply_holomorphic(z, rot_ * fam_.value(c, z.value()), rot_ * fam_.slope(c, z.value()));
}

Complex ChartLamination::project(Complex z, Complex w) const {
  if (identity_) return fam_.project(z, w);
  return rot_ * fam_.value(fam_.project(z, w / rot_), center_);
}

CJet ChartLamination::project(const CJet& z, const CJet& w) const {
  if (identity_) return fam_.project(z, w);
  // u = rot * f_{pi(z, w / rot)}(p); holomorphic in (z, w).
  const Complex zv = z.value();
  const Complex c = fam_.project(zv, w.value() / rot_);
  const Complex dc_dw = 1.0 / (rot_ * fam_.param_derivative(c, zv));
  const Complex dc_dz = -fam_.slope(c, zv) / fam_.param_derivative(c, zv);
  const Complex du_dc = rot_ * fam_.param_derivative(c, center_);
  return apply_holomorphic(z, w, rot_ * fam_.value(c, center_), du_dc * dc_dz, du_dc * dc_dw);
}

CJet normalized_w(const ChartLamination& lam, double delta, int j, int k, const CJet& z,
                  const CJet& w) {
  const CJet f00 = lam.value(Complex(j, k) * delta, z);
  const CJet f10 = lam.value(Complex(j + 1, k) * delta, z);
  return (w - f00) / (f10 - f00);
}

Complex normalized_w(const LeafFamily& fam, const GridSpec& grid, int j, int k, Complex z,
                     Complex w) {
  if (!grid.in_range(j, k))
    throw IndexError(fmt::format("grid cell ({}, {}) outside |c| <= 2R", j, k));
  const ChartLamination lam(fam, grid.center);
  const Complex f00 = lam.value(grid.point(j, k), z);
  const Complex f10 = lam.value(grid.point(j + 1, k), z);
  return (w - f00) / (f10 - f00);
}

}  // namespace lam
