#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "lamination/currents.hpp"
#include "lamination/errors.hpp"
#include "lamination/random.hpp"

using namespace lam;
using std::numbers::pi;

namespace {

const Complex kI(0.0, 1.0);

std::vector<LeafFamily> builtins() {
  return {LeafFamily::product(), LeafFamily::shear(0.5), LeafFamily::exp(0.2),
          LeafFamily::nonlinear(0.05)};
}

// Integral of a function of z over the disc in polar coordinates with
// adaptive Gauss-Kronrod in both directions.
Complex polar_integral(const std::function<Complex(Complex)>& f, Complex center, double radius) {
  using boost::math::quadrature::gauss_kronrod;
  auto part = [&](auto proj) {
    return gauss_kronrod<double, 31>::integrate(
        [&](double r) {
          return r * gauss_kronrod<double, 31>::integrate(
                         [&](double th) { return proj(f(center + std::polar(r, th))); }, 0.0,
                         2.0 * pi, 10, 1e-13);
        },
        0.0, radius, 10, 1e-13);
  };
  return {part([](Complex v) { return v.real(); }), part([](Complex v) { return v.imag(); })};
}

// rho (i/2) dz ^ dzbar, with rho the radial bump of the support.
Form11 area_bump(Support s) {
  Form11 f;
  f.id = "area";
  f.support = s;
  f.w11 = [s](Complex z, Complex) { return 0.5 * kI * bump(z, s); };
  return f;
}

// rho (i/2) lambda ^ conj(lambda) for the leaf-adapted lambda.
Form11 lambda_square(const LeafFamily& fam, Support s) {
  Form11 f;
  f.support = s;
  auto slope = [fam](Complex z, Complex w) { return fam.slope(fam.project(z, w), z); };
  const Complex h = 0.5 * kI;
  f.w11 = [=](Complex z, Complex w) { return h * bump(z, s) * std::norm(slope(z, w)); };
  f.w12 = [=](Complex z, Complex w) { return -h * bump(z, s) * slope(z, w); };
  f.w21 = [=](Complex z, Complex w) { return -h * bump(z, s) * std::conj(slope(z, w)); };
  f.w22 = [=](Complex z, Complex) { return h * bump(z, s); };
  return f;
}

}  // namespace

TEST_CASE("tangent 2-fields") {
  const auto p = tangent_2field(LeafFamily::product(), 0.3, 0.2);
  CHECK(p.v1[0] == Complex(1.0));
  CHECK(p.v1[1] == Complex(0.0));
  CHECK(p.v2[0] == kI);
  CHECK(p.v2[1] == Complex(0.0));
  const auto s = tangent_2field(LeafFamily::shear(0.5), 1.0, {0.1, 0.2});
  CHECK(std::abs(s.v1[1] - 0.5) < 1e-15);
  CHECK(std::abs(s.v2[1] - 0.5 * kI) < 1e-15);
  const auto e = tangent_2field(LeafFamily::exp(0.2), 1.0, 0.0);
  CHECK(std::abs(e.v1[1] - 0.2) < 1e-15);
}

TEST_CASE("omega on the tangent field") {
  const CounterRng rng(1, 1);
  const auto fam = LeafFamily::shear(0.5);
  for (int i = 0; i < 100; ++i) {
    CounterRng r = rng.at(i);
    const Complex kappa(r.normal(), r.normal());
    CHECK(omega_on_v(scalar_form(kappa), fam, r.in_disc(2.0), r.in_disc(0.5)) == kappa);
  }
  CHECK(omega_on_v(scalar_form(1.0), fam, 0.4, 0.1) == Complex(1.0));

  for (const auto& f : builtins()) {
    const Form11 ll = lambda_square(f, {0.0, 0.5});
    Form11 dz_lbar;
    dz_lbar.w12 = [](Complex, Complex) { return Complex(1.0); };
    dz_lbar.w11 = [f](Complex z, Complex w) { return -std::conj(f.slope(f.project(z, w), z)); };
    Form11 l_dzbar;
    l_dzbar.w21 = [](Complex, Complex) { return Complex(1.0); };
    l_dzbar.w11 = [f](Complex z, Complex w) { return -f.slope(f.project(z, w), z); };
    for (int i = 0; i < 50; ++i) {
      CounterRng r = rng.at(500 + i);
      const Complex c = r.in_disc(2.0), z = r.in_disc(0.45);
      CHECK(std::abs(omega_on_v(ll, f, c, z)) < 1e-15);
      CHECK(std::abs(omega_on_v(dz_lbar, f, c, z)) < 1e-15);
      CHECK(std::abs(omega_on_v(l_dzbar, f, c, z)) < 1e-15);
    }
  }
}

TEST_CASE("leaf integral of a radial bump") {
  const Support s{{0.1, -0.05}, 0.4};
  const Quadrature quad = Quadrature::for_disc(64, s.center, s.radius);
  const Complex value = leaf_integral(LeafFamily::product(), 0.0, area_bump(s), quad);
  const Complex oracle = polar_integral([&](Complex z) { return bump(z, s); }, s.center, s.radius);
  CHECK(std::abs(oracle - pi * 0.16 / 5.0) < 1e-12);
  CHECK(std::abs(value - oracle) < 1e-8);
}

TEST_CASE("forms supported away from the leaf pair to zero") {
  const Support s{0.0, 0.4};
  Form11 far = area_bump(s);
  far.w11 = [s](Complex z, Complex w) {
    return std::abs(w - 5.0) < 1.0 ? bump(z, s) * (1.0 - std::norm(w - 5.0)) : 0.0;
  };
  const Quadrature quad = Quadrature::for_disc(32, s.center, s.radius);
  CHECK(leaf_integral(LeafFamily::shear(0.5), 0.3, far, quad) == Complex(0.0));
  for (const auto& f : builtins())
    CHECK(std::abs(leaf_integral(f, {0.4, -0.7}, lambda_square(f, s), quad)) < 1e-14);
}

TEST_CASE("leaf integral configuration errors") {
  const Support s{0.0, 0.4};
  CHECK_THROWS_AS(leaf_integral(LeafFamily::product(), 0.0, area_bump(s),
                                Quadrature::for_disc(16, 0.3, 0.2)),
                  ConfigError);
  CHECK_THROWS_AS(leaf_integral(LeafFamily::product(), 0.0, area_bump({0.8, 0.4}),
                                Quadrature::for_disc(16, 0.8, 0.4)),
                  ConfigError);
}

TEST_CASE("pairings are linear") {
  const auto fam = LeafFamily::exp(0.2);
  const auto forms = form11_battery(2, 5);
  const Quadrature quad = Quadrature::for_disc(48, 0.0, 0.56);
  const Complex i1 = leaf_integral(fam, 0.5, forms[0], quad);
  const Complex i2 = leaf_integral(fam, {-0.2, 1.0}, forms[0], quad);
  CHECK(std::abs(current_pair(DirectedCurrent(fam, {{0.5, 1.0}}), forms[0], fam, quad) - i1) <
        1e-15);
  const DirectedCurrent T(fam, {{0.5, 2.0}, {{-0.2, 1.0}, 3.0}});
  CHECK(std::abs(current_pair(T, forms[0], fam, quad) - (2.0 * i1 + 3.0 * i2)) <
        1e-12 * std::abs(i1));

  Form11 sum = forms[0];
  sum.w11 = [&](Complex z, Complex w) {
    return forms[0].w11(z, w) + 2.0 * forms[1].w11(z, w);
  };
  sum.w22 = [&](Complex z, Complex w) {
    return forms[0].w22(z, w) + 2.0 * forms[1].w22(z, w);
  };
  sum.w12 = [&](Complex z, Complex w) {
    return forms[0].w12(z, w) + 2.0 * forms[1].w12(z, w);
  };
  sum.w21 = [&](Complex z, Complex w) {
    return forms[0].w21(z, w) + 2.0 * forms[1].w21(z, w);
  };
  sum.support = {0.0, 0.55};
  const Complex lhs = current_pair(T, sum, fam, quad);
  const Complex rhs = current_pair(T, forms[0], fam, quad) + 2.0 * current_pair(T, forms[1], fam, quad);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
}

TEST_CASE("five-atom shear current against per-leaf oracles") {
  const auto fam = LeafFamily::shear(0.5);
  const DirectedCurrent T(fam, {{-1.0, 1.0}, {{1.0, -1.0}, 1.0}, {0.2, 1.0}, {{0.0, 1.5}, 1.0},
                                {{-0.5, -0.5}, 1.0}});
  const Support s{{0.05, 0.1}, 0.45};
  Form11 omega = area_bump(s);
  omega.w22 = omega.w11;
  const Quadrature quad = Quadrature::for_disc(64, s.center, s.radius);
  Complex oracle = 0.0;
  for (const auto& atom : T.atoms())
    oracle += atom.weight * (1.0 + std::norm(0.5 * atom.c)) * pi * s.radius * s.radius / 5.0;
  CHECK(std::abs(current_pair(T, omega, fam, quad) - oracle) < 1e-8);
}

TEST_CASE("currents validate their atoms") {
  const auto fam = LeafFamily::product();
  CHECK_THROWS_AS(DirectedCurrent(fam, {{0.0, 0.0}}), PreconditionError);
  CHECK_THROWS_AS(DirectedCurrent(fam, {{0.0, -1.0}}), PreconditionError);
  CHECK_THROWS_AS(DirectedCurrent(fam, {{3.0, 1.0}}), DomainError);
  const DirectedCurrent T = random_current(fam, 7, 3, {-1, -1}, {1, 1});
  CHECK(T.atoms().size() == 7);
  for (const auto& a : T.atoms()) {
    CHECK(a.weight >= 0.5);
    CHECK(a.weight <= 2.0);
  }
}

TEST_CASE("directed currents are weakly directed") {
  const auto forms = form01_battery(10, 42);
  const Quadrature quad = Quadrature::for_disc(64, 0.0, 0.55);
  for (const auto& fam : builtins()) {
    CAPTURE(fam.name());
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const DirectedCurrent T = random_current(fam, 10, seed, {-1.4, -1.4}, {1.4, 1.4});
      for (const auto& phi : forms) CHECK(wedge_defect(T, phi, fam, quad) <= 1e-8);
    }
    Form01 zero;
    zero.support = {0.0, 0.5};
    const DirectedCurrent T(fam, {{0.3, 1.0}});
    CHECK(wedge_defect(T, zero, fam, quad) == 0.0);
  }
}

TEST_CASE("dw in place of lambda is detected") {
  const auto fam = LeafFamily::shear(0.5);
  const auto forms = form01_battery(3, 7);
  const Quadrature quad = Quadrature::for_disc(64, 0.0, 0.55);
  const DirectedCurrent T(fam, {{1.0, 1.0}});
  for (const auto& phi : forms) {
    const Complex oracle = Complex(0.0, -2.0) * polar_integral(
        [&](Complex z) {
          const Complex w = fam.value(1.0, z), s = fam.slope(1.0, z);
          return s * phi.phi1(z, w) + std::norm(s) * phi.phi2(z, w);
        },
        phi.support.center, phi.support.radius);
    const double defect = wedge_defect(T, phi, fam, quad, WedgeForm::Dw);
    CHECK(defect > 1e-3);
    CHECK(defect == doctest::Approx(std::abs(oracle)).epsilon(1e-8));
  }
}

TEST_CASE("bump batteries") {
  const auto f11 = form11_battery(10, 1);
  const auto f01 = form01_battery(10, 1);
  CHECK(f11.size() == 10);
  CHECK(f01.size() == 10);
  for (const auto& f : f11) {
    CHECK(std::abs(f.support.center) + f.support.radius <= 0.55 + 1e-12);
    const Complex v = omega_on_v(f, LeafFamily::shear(0.5), 0.7, f.support.center);
    CHECK(std::isfinite(v.real()));
    CHECK(std::abs(v.real()) < 1e-15);
    CHECK(v.imag() > 0.0);
  }
  const Support s{0.1, 0.3};
  const double h = 1e-6;
  const Complex z(0.15, 0.05);
  const Complex fd = 0.5 * ((bump(z + h, s) - bump(z - h, s)) / (2 * h) -
                            kI * (bump(z + kI * h, s) - bump(z - kI * h, s)) / (2 * h));
  CHECK(std::abs(fd - bump_dz(z, s)) < 1e-8);
}

TEST_CASE("disintegration of points on a single leaf") {
  const auto fam = LeafFamily::exp(0.2);
  const DirectedCurrent T(fam, {{0.0, 1.0}});
  const auto samples = riesz_samples(T, fam, 1000, 3);
  const Disintegration dis = disintegrate(fam, samples);
  REQUIRE(dis.bins.size() == 1);
  CHECK(std::abs(dis.bins[0].alpha) < 1e-15);
  CHECK(dis.total_mass() == doctest::Approx(pi * 0.56 * 0.56).epsilon(1e-12));
  CHECK_THROWS_AS(disintegrate(fam, {}), PreconditionError);
  CHECK_THROWS_AS(disintegrate(fam, {{0.9, 0.0, 1.0}}), PreconditionError);
}

TEST_CASE("disintegration conserves mass") {
  const auto fam = LeafFamily::nonlinear(0.05);
  const DirectedCurrent T = random_current(fam, 6, 4, {-1, -1}, {1, 1});
  const auto samples = riesz_samples(T, fam, 20000, 5);
  double input = 0.0;
  for (const auto& p : samples) input += p.mass;
  const Disintegration dis = disintegrate(fam, samples);
  CHECK(dis.total_mass() == doctest::Approx(input).epsilon(1e-13));
  CHECK(input == doctest::Approx(T.total_mass() * pi * 0.56 * 0.56).epsilon(1e-13));
  for (const auto& bin : dis.bins) {
    double integral = 0.0;
    const double cell = 1.12 / dis.base_cells;
    for (double d : bin.histogram) integral += d * cell * cell;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("uniform product cloud gives flat bins") {
  const auto fam = LeafFamily::product();
  constexpr std::size_t n = 100000;
  std::vector<WeightedPoint> cloud;
  const CounterRng rng(77, 0);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng r = rng.at(i);
    const Complex z(r.uniform(-0.5, 0.5), r.uniform(-0.5, 0.5));
    const Complex w(r.uniform(), r.uniform());
    cloud.push_back({z, w, 1.0 / n});
  }
  DisintegrationOptions opt;
  opt.param_box = {{0.0, 0.0}, {1.0, 1.0}};
  opt.base_box = {{-0.5, -0.5}, {0.5, 0.5}};
  opt.bins_per_axis = 8;
  opt.base_cells = 4;
  const Disintegration dis = disintegrate(fam, cloud, opt);
  REQUIRE(dis.bins.size() == 64);
  const double expected = n / 64.0;
  double chi2 = 0.0;
  for (const auto& bin : dis.bins) chi2 += std::pow(bin.mass * n - expected, 2) / expected;
  // 63 degrees of freedom: mean 63, standard deviation ~11.
  CHECK(chi2 < 63.0 + 4.0 * std::sqrt(126.0));
  double sigma_chi2 = 0.0;
  for (const auto& bin : dis.bins) {
    const double count = bin.mass * n / 16.0;
    for (double d : bin.histogram) sigma_chi2 += std::pow(d * count - count, 2) / count;
  }
  // 64 bins of 15 degrees of freedom each.
  CHECK(sigma_chi2 < 960.0 + 4.0 * std::sqrt(1920.0));
}

TEST_CASE("two equal leaves give equal bins") {
  const auto fam = LeafFamily::shear(0.5);
  const DirectedCurrent T(fam, {{0.0, 1.0}, {1.0, 1.0}});
  const Disintegration dis = disintegrate(fam, riesz_samples(T, fam, 20000, 9));
  REQUIRE(dis.bins.size() == 2);
  CHECK(dis.bins[0].mass / dis.bins[1].mass == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("reconstruction from sampled disintegration") {
  const auto fam = LeafFamily::shear(0.5);
  const Quadrature quad = Quadrature::for_disc(64, 0.0, 0.56);
  const auto forms = form11_battery(5, 11);

  const DirectedCurrent single(fam, {{{0.3, -0.2}, 1.0}});
  const auto rows =
      reconstruct_and_compare(single, disintegrate(fam, riesz_samples(single, fam, 100000, 1)),
                              forms, fam, quad);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) CHECK(row.residual <= 0.01);

  const DirectedCurrent empty;
  const auto none = reconstruct_and_compare(empty, uniform_disintegration(empty, 0.0, 0.5), forms,
                                            fam, quad);
  for (const auto& row : none) CHECK(row.residual == 0.0);
}

TEST_CASE("reconstruction from exact disintegration") {
  const auto fam = LeafFamily::exp(0.2);
  const DirectedCurrent T = random_current(fam, 5, 2, {-1, -1}, {1, 1});
  const Quadrature quad = Quadrature::for_disc(64, 0.0, 0.56);
  const auto rows = reconstruct_and_compare(T, uniform_disintegration(T, 0.0, 0.56),
                                            form11_battery(5, 3), fam, quad);
  for (const auto& row : rows) CHECK(row.residual < 1e-3);
}

TEST_CASE("closedness residual") {
  const auto fam = LeafFamily::shear(0.5);
  const DirectedCurrent T = random_current(fam, 4, 8, {-1, -1}, {1, 1});
  const auto forms = form01_battery(5, 2);
  const auto one = [](Complex) { return 1.0; };
  CHECK(closedness_residual(uniform_disintegration(T, 0.0, 0.56), fam, forms, one) <= 1e-6);
  CHECK(closedness_residual(tilted_disintegration(T, 0.0, 0.56, 1.0), fam, forms, one) > 1e-3);
  CHECK(closedness_residual(tilted_disintegration(T, 0.0, 0.56, 1.0), fam, forms,
                            [](Complex) { return 0.0; }) == 0.0);
}
