#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lamination/errors.hpp"
#include "lamination/estimates.hpp"

using namespace lam;

TEST_CASE("Schwarz bound for constant functions") {
  const NonvanishingSample f({Complex(-0.7, 0.2)});
  const BoundCheck b = schwarz_log_bound(f);
  CHECK(b.lhs == 0.0);
  CHECK(b.holds);
}

TEST_CASE("Schwarz bound for exp(-1 - z)") {
  const NonvanishingSample f({-1.0, -1.0});
  const BoundCheck b = schwarz_log_bound(f);
  CHECK(b.lhs == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(b.rhs == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(b.lhs == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(b.rhs == doctest::Approx(0.73576).epsilon(1e-5));
  CHECK(b.holds);
}

TEST_CASE("Schwarz bound for exp(-0.1 - 0.05 z)") {
  const NonvanishingSample f({-0.1, -0.05});
  const BoundCheck b = schwarz_log_bound(f);
  CHECK(b.lhs == doctest::Approx(0.05 * std::exp(-0.1)).epsilon(1e-14));
  CHECK(b.rhs == doctest::Approx(0.2 * std::exp(-0.1)).epsilon(1e-14));
  CHECK(b.holds);
}

TEST_CASE("Schwarz bound rejects invalid samples") {
  CHECK_THROWS_AS(schwarz_log_bound(NonvanishingSample({0.5})), PreconditionError);
  CHECK_THROWS_AS(schwarz_log_bound(NonvanishingSample({-0.5, 0.0, 1.0})), PreconditionError);
}

TEST_CASE("random nonvanishing samples have Re u < 0") {
  const CounterRng rng(21, 0);
  for (int i = 0; i < 200; ++i) {
    CounterRng r = rng.at(i);
    const auto f = NonvanishingSample::random(r);
    CHECK(f.max_real_exponent_on_boundary() < 0.0);
    const double a = std::abs(f.value(0.0));
    CHECK(a > 0.0);
    CHECK(a < 1.0);
  }
}

TEST_CASE("pair slope bound examples") {
  const BoundCheck product = pair_slope_bound(LeafFamily::product(), 0.3, 0.1, 0.2);
  CHECK(product.lhs == 0.0);
  CHECK(product.holds);

  const BoundCheck shear = pair_slope_bound(LeafFamily::shear(0.5), 0.1, 0.0, 0.0);
  CHECK(shear.lhs == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(shear.rhs == doctest::Approx(0.4 * std::log(10.0)).epsilon(1e-14));
  CHECK(shear.rhs == doctest::Approx(0.9210).epsilon(1e-4));
  CHECK(shear.holds);

  const BoundCheck exp = pair_slope_bound(LeafFamily::exp(0.2), 0.5 + 1e-3, 0.5, 0.25);
  CHECK(exp.holds);
  CHECK(exp.lhs < exp.rhs);
}

TEST_CASE("pair slope bound preconditions") {
  const LeafFamily fam = LeafFamily::shear(0.5);
  CHECK_THROWS_AS(pair_slope_bound(fam, 0.1, 0.0, 0.5), PreconditionError);
  CHECK_THROWS_AS(pair_slope_bound(fam, 0.1, 0.1, 0.0), PreconditionError);
  CHECK_THROWS_AS(pair_slope_bound(fam, 1.5, -0.5, 0.0), PreconditionError);
}

TEST_CASE("sup of leaf differences") {
  CHECK(sup_leaf_difference(LeafFamily::product(), 0.3, 0.1) == doctest::Approx(0.2));
  CHECK(sup_leaf_difference(LeafFamily::shear(0.5), 0.2, 0.0) == doctest::Approx(0.3));
  CHECK(sup_leaf_difference(LeafFamily::exp(0.2), 0.1, 0.0) ==
        doctest::Approx(0.1 * std::exp(0.2)));
}

TEST_CASE("batteries find no violations") {
  const BatteryResult s = schwarz_battery(5000, 42, 2);
  CHECK(s.samples == 5000);
  CHECK(s.violations == 0);
  CHECK(s.worst_ratio <= 1.0);
  for (const auto& fam : {LeafFamily::product(), LeafFamily::shear(0.5), LeafFamily::exp(0.2),
                          LeafFamily::nonlinear(0.05)}) {
    CAPTURE(fam.name());
    const BatteryResult r = corollary_battery(fam, 2000, 42, 2);
    CHECK(r.violations == 0);
    CHECK(r.samples + r.skipped == 2000);
  }
}

TEST_CASE("batteries do not depend on the thread count") {
  const BatteryResult a = schwarz_battery(3000, 9, 1);
  const BatteryResult b = schwarz_battery(3000, 9, 4);
  CHECK(a.worst_ratio == b.worst_ratio);
  const auto fam = LeafFamily::exp(0.2);
  CHECK(corollary_battery(fam, 1000, 9, 1).worst_ratio ==
        corollary_battery(fam, 1000, 9, 3).worst_ratio);
}

TEST_CASE("delta0 search") {
  CHECK(delta0_search(LeafFamily::product(), 1.0, 2000) == 1.0);
  CHECK(delta0_search(LeafFamily::shear(0.5), 1.0, 5000) >= 0.25);
  CHECK(delta0_search(LeafFamily::nonlinear(0.05), 1.0, 5000) > 0.0);
}

TEST_CASE("t0 search") {
  const std::vector<double> deltas{0.2, 0.1, 0.05};
  CHECK(t0_cap() == doctest::Approx(0.25 * std::numbers::ln2));
  CHECK(compute_t0(LeafFamily::product(), deltas, 2, 1.0) == t0_cap());
  CHECK(compute_t0(LeafFamily::shear(0.5), deltas, 2, 1.0) == t0_cap());
  CHECK(max_drift(LeafFamily::shear(0.5), 0.1, 2, 1.0, t0_cap()) < 1e-12);
  const double t0 = compute_t0(LeafFamily::nonlinear(0.05), deltas, 2, 1.0);
  CHECK(t0 > 0.0);
  CHECK(t0 <= t0_cap());
  CHECK_THROWS_AS(compute_t0(LeafFamily::shear(0.5), deltas, 1, 1.0), PreconditionError);
}

TEST_CASE("drift shrinks with delta") {
  const auto fam = LeafFamily::nonlinear(0.05);
  double prev = max_drift(fam, 0.2, 2, 1.0, t0_cap());
  CHECK(prev > 0.0);
  for (double delta : {0.1, 0.05, 0.025}) {
    const double d = max_drift(fam, delta, 2, 1.0, t0_cap());
    CHECK(d <= prev + 1e-15);
    prev = d;
  }
}

TEST_CASE("delta squared separation") {
  const auto product = separation_check(LeafFamily::product(), 0.1, 0.17, 1.0);
  CHECK(product.pass);
  CHECK(product.min_ratio == doctest::Approx(10.0));

  const auto shear = separation_check(LeafFamily::shear(0.5), 0.1, 0.17, 1.0);
  CHECK(shear.pass);
  CHECK(shear.min_ratio * 0.01 >= 0.1 * (1.0 - 0.5 * 0.17) - 1e-12);
  CHECK(shear.min_sharp_margin >= 1.0 - 1e-12);

  CHECK(separation_check(LeafFamily::exp(0.2), 0.05, t0_cap(), 1.0).pass);
  CHECK(separation_check(LeafFamily::nonlinear(0.05), 0.05, t0_cap(), 1.0).pass);
}
