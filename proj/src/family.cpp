#include "lamination/family.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "lamination/errors.hpp"
#include "lamination/random.hpp"

namespace lam {

namespace {

constexpr double kRangeSlack = 1e-12;

double parse_double(const Record& rec, const std::string& key, double fallback) {
  const auto it = rec.find(key);
  if (it == rec.end() || it->second.empty()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("family field '{}': cannot parse '{}' as a number", key,
                                  it->second));
  }
}

void check_base_point(Complex z) {
  if (!is_finite(z)) throw DomainError("base point is not finite");
  if (std::abs(z) >= LeafFamily::base_radius())
    throw DomainError(fmt::format("base point |z| = {} outside the unit disc", std::abs(z)));
}

void check_parameter(const LeafFamily& fam, Complex c) {
  if (!is_finite(c)) throw DomainError("leaf parameter is not finite");
  if (std::abs(c) > fam.param_limit() * (1.0 + kRangeSlack))
    throw DomainError(fmt::format("leaf parameter |c| = {} outside |c| <= 2R = {}", std::abs(c),
                                  fam.param_limit()));
}

}  // namespace

bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

const char* kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Product: return "product";
    case FamilyKind::Shear: return "shear";
    case FamilyKind::Exp: return "exp";
    case FamilyKind::Nonlinear: return "nonlinear";
  }
  return "?";
}

LeafFamily LeafFamily::product(double R) { return {FamilyKind::Product, R}; }

LeafFamily LeafFamily::shear(Complex a, double R) {
  LeafFamily f(FamilyKind::Shear, R);
  f.a_ = a;
  return f;
}

LeafFamily LeafFamily::exp(Complex lam, double R) {
  LeafFamily f(FamilyKind::Exp, R);
  f.lam_ = lam;
  return f;
}

LeafFamily LeafFamily::nonlinear(double eps, double R) {
  LeafFamily f(FamilyKind::Nonlinear, R);
  f.eps_ = eps;
  return f;
}

bool LeafFamily::satisfies_constraints() const {
  if (!(R_ > 0.0)) return false;
  switch (kind_) {
    case FamilyKind::Product: return true;
    case FamilyKind::Shear: return std::abs(a_) < 1.0;
    case FamilyKind::Exp: return is_finite(lam_);
    case FamilyKind::Nonlinear: return eps_ * 4.0 * R_ < 1.0;
  }
  return false;
}

std::string LeafFamily::name() const {
  switch (kind_) {
    case FamilyKind::Product: return "product";
    case FamilyKind::Shear:
      return a_.imag() == 0.0 ? fmt::format("shear({})", a_.real())
                              : fmt::format("shear({}{:+}i)", a_.real(), a_.imag());
    case FamilyKind::Exp:
      return lam_.imag() == 0.0 ? fmt::format("exp({})", lam_.real())
                                : fmt::format("exp({}{:+}i)", lam_.real(), lam_.imag());
    case FamilyKind::Nonlinear: return fmt::format("nonlinear({})", eps_);
  }
  return "?";
}

Complex LeafFamily::value(Complex c, Complex z) const {
  switch (kind_) {
    case FamilyKind::Product: return c;
    case FamilyKind::Shear: return c * (1.0 + a_ * z);
    case FamilyKind::Exp: return c * std::exp(lam_ * z);
    case FamilyKind::Nonlinear: return c + eps_ * c * c * z;
  }
  return {};
}

Complex LeafFamily::slope(Complex c, Complex z) const {
  switch (kind_) {
    case FamilyKind::Product: return 0.0;
    case FamilyKind::Shear: return c * a_;
    case FamilyKind::Exp: return c * lam_ * std::exp(lam_ * z);
    case FamilyKind::Nonlinear: return eps_ * c * c;
  }
  return {};
}

Complex LeafFamily::param_derivative(Complex c, Complex z) const {
  switch (kind_) {
    case FamilyKind::Product: return 1.0;
    case FamilyKind::Shear: return 1.0 + a_ * z;
    case FamilyKind::Exp: return std::exp(lam_ * z);
    case FamilyKind::Nonlinear: return 1.0 + 2.0 * eps_ * c * z;
  }
  return {};
}

Complex LeafFamily::project(Complex z, Complex w) const {
  switch (kind_) {
    case FamilyKind::Product: return w;
    case FamilyKind::Shear: {
      const Complex den = 1.0 + a_ * z;
      if (den == 0.0) throw DomainError("shear projection: 1 + a z vanishes");
      return w / den;
    }
    case FamilyKind::Exp: return w * std::exp(-lam_ * z);
    case FamilyKind::Nonlinear: {
      // Root of eps z c^2 + c - w = 0 tending to w as z -> 0.  On the valid
      // range 1 + 2 eps z c = sqrt(1 + 4 eps z w) has positive real part, so
      // the principal root is the right one; the rationalized form avoids
      // cancellation for small eps z.
      const Complex disc = 1.0 + 4.0 * eps_ * z * w;
      if (disc.imag() == 0.0 && disc.real() <= 0.0)
        throw DomainError("nonlinear projection: discriminant on the branch cut");
      return 2.0 * w / (1.0 + std::sqrt(disc));
    }
  }
  return {};
}

CJet LeafFamily::project(const CJet& z, const CJet& w) const {
  const Complex c = project(z.value(), w.value());
  const Complex dc = param_derivative(c, z.value());
  const Complex dw = 1.0 / dc;
  const Complex dz = -slope(c, z.value()) / dc;
  return apply_holomorphic(z, w, c, dz, dw);
}

Complex leaf_value(const LeafFamily& fam, Complex c, Complex z) {
  check_base_point(z);
  check_parameter(fam, c);
  return fam.value(c, z);
}

Complex leaf_slope(const LeafFamily& fam, Complex c, Complex z) {
  check_base_point(z);
  check_parameter(fam, c);
  return fam.slope(c, z);
}

Complex project(const LeafFamily& fam, Complex z, Complex w) {
  check_base_point(z);
  if (!is_finite(w)) throw DomainError("fiber coordinate is not finite");
  const Complex c = fam.project(z, w);
  if (fam.kind() == FamilyKind::Nonlinear &&
      std::real(1.0 + 2.0 * fam.eps() * z * c) <= 0.0)
    throw DomainError("nonlinear projection: point outside the single-valued branch");
  return c;
}

DisjointnessReport verify_disjointness(const LeafFamily& fam, std::size_t n_samples,
                                       std::uint64_t seed, double tolerance) {
  const double climit = fam.param_limit();
  constexpr double zlimit = 0.999;

  auto ratio = [&](Complex c, Complex c2, Complex z) {
    return std::abs(fam.value(c, z) - fam.value(c2, z)) / std::abs(c - c2);
  };

  DisjointnessReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  const CounterRng rng(seed, 0xd15);
  for (std::size_t i = 0; i < n_samples; ++i) {
    CounterRng r = rng.at(i);
    const Complex c = r.in_disc(climit);
    const Complex c2 = r.in_disc(climit);
    const Complex z = r.in_disc(zlimit);
    if (c == c2) continue;
    const double g = ratio(c, c2, z);
    if (g < rep.min_gap) {
      rep.min_gap = g;
      rep.witness_c = c;
      rep.witness_c2 = c2;
      rep.witness_z = z;
    }
  }

  if (std::isfinite(rep.min_gap)) {
    // Compass search on the six real coordinates of the worst sample.
    std::array<double, 6> x{rep.witness_c.real(),  rep.witness_c.imag(),
                            rep.witness_c2.real(), rep.witness_c2.imag(),
                            rep.witness_z.real(),  rep.witness_z.imag()};
    auto unpack = [](const std::array<double, 6>& p) {
      return std::array<Complex, 3>{Complex(p[0], p[1]), Complex(p[2], p[3]),
                                    Complex(p[4], p[5])};
    };
    auto admissible = [&](const std::array<Complex, 3>& p) {
      return std::abs(p[0]) <= climit && std::abs(p[1]) <= climit &&
             std::abs(p[2]) <= zlimit && p[0] != p[1];
    };
    double step = 0.1 * climit;
    while (step > 1e-10) {
      bool improved = false;
      for (int k = 0; k < 6; ++k) {
        for (double sgn : {1.0, -1.0}) {
          auto y = x;
          y[k] += sgn * step;
          const auto p = unpack(y);
          if (!admissible(p)) continue;
          const double g = ratio(p[0], p[1], p[2]);
          if (g < rep.min_gap) {
            rep.min_gap = g;
            x = y;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    const auto p = unpack(x);
    rep.witness_c = p[0];
    rep.witness_c2 = p[1];
    rep.witness_z = p[2];
  }
  rep.pass = rep.min_gap > tolerance;
  return rep;
}

Record to_record(const LeafFamily& fam) {
  auto num = [](double v) { return fmt::format("{}", v); };
  return {{"kind", kind_name(fam.kind())},  {"a_re", num(fam.a().real())},
          {"a_im", num(fam.a().imag())},    {"lam_re", num(fam.lam().real())},
          {"lam_im", num(fam.lam().imag())}, {"eps", num(fam.eps())},
          {"R", num(fam.radius())}};
}

LeafFamily family_from_record(const Record& rec) {
  const auto it = rec.find("kind");
  if (it == rec.end()) throw ConfigError("family record: missing 'kind'");
  const double R = parse_double(rec, "R", 1.0);
  if (!(R > 0.0)) throw ConfigError("family record: R must be positive");
  const std::string& kind = it->second;
  LeafFamily fam = LeafFamily::product(R);
  if (kind == "product") {
    fam = LeafFamily::product(R);
  } else if (kind == "shear") {
    fam = LeafFamily::shear({parse_double(rec, "a_re", 0.0), parse_double(rec, "a_im", 0.0)}, R);
  } else if (kind == "exp") {
    fam = LeafFamily::exp({parse_double(rec, "lam_re", 0.0), parse_double(rec, "lam_im", 0.0)}, R);
  } else if (kind == "nonlinear") {
    fam = LeafFamily::nonlinear(parse_double(rec, "eps", 0.0), R);
  } else {
    throw ConfigError(fmt::format("family record: unknown kind '{}'", kind));
  }
  if (!fam.satisfies_constraints())
    throw ConfigError(fmt::format("family {} violates its disjointness constraint", fam.name()));
  return fam;
}

}  // namespace lam
