#include <cmath>

#include "doctest.h"

#include "hk/monotone.hpp"

using namespace hk;

TEST_SUITE("monotone") {
  TEST_CASE("catalog") {
    const MonotoneFunction m = monotone_catalog("mobius", {{"a", 1.0}, {"b", 2.0}, {"c", 1.0}, {"d", 3.0}});
    CHECK(m.claimed_monotone);
    CHECK(m.lo == -3.0);
    CHECK(m.value(0.0) == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(monotone_catalog("square").claimed_monotone);
    CHECK_FALSE(monotone_catalog("power", {{"s", 2.0}}).claimed_monotone);
    CHECK(monotone_catalog("sqrt", {{"hi", 4.0}}).hi == 4.0);
    CHECK_THROWS_AS(monotone_catalog("cube"), Error);
    for (const MonotoneFunction& f : claimed_monotone_instances()) {
      const auto [a, b] = loewner_test_interval(f);
      CHECK(f.in_domain(a));
      CHECK(f.in_domain(b));
      CHECK(f.value(b) > f.value(a));
    }
  }

  TEST_CASE("Loewner test examples") {
    LoewnerOptions o;
    o.n = 3;
    o.trials = 100;
    const LoewnerReport sq = loewner_matrix_test(monotone_catalog("square", {{"lo", 0.0}, {"hi", 2.0}}), o);
    CHECK_FALSE(sq.pass);
    CHECK(sq.first_violation >= 0);
    CHECK(sq.first_violation < 100);

    o.n = 4;
    o.trials = 1000;
    CHECK(loewner_matrix_test(monotone_catalog("sqrt", {{"hi", 4.0}}), o).pass);

    o.tolerance = 1e-12;
    const LoewnerReport af = loewner_matrix_test(monotone_catalog("affine", {{"a", 3.0}, {"b", -1.0}}), o);
    CHECK(af.pass);
    CHECK(af.min_eig >= -1e-12 * af.scale);
  }

  TEST_CASE("Loewner test is reproducible from the seed") {
    LoewnerOptions o;
    o.n = 3;
    o.trials = 200;
    o.seed = 42;
    const MonotoneFunction f = monotone_catalog("log", {{"c", 1.0}});
    const LoewnerReport a = loewner_matrix_test(f, o);
    const LoewnerReport b = loewner_matrix_test(f, o);
    CHECK(a.min_eig == b.min_eig);
    CHECK(a.resamples == b.resamples);
    o.seed = 43;
    CHECK(loewner_matrix_test(f, o).min_eig != a.min_eig);
  }

  TEST_CASE("composition") {
    const RealFunction f = tanh_affine(1.0, kPi / 2.0), g = tanh_affine(1.0, 1.0);
    const MonotoneFunction id = monotone_catalog("identity");
    const FunctionPair same = compose_pair(id, f, id, g);
    for (double t : {-1.0, 0.3, 2.0}) {
      CHECK(same.f(t) == f(t));
      CHECK(same.g(t) == g(t));
    }
    const FunctionPair lg = compose_pair(monotone_catalog("log", {{"c", 2.0}}), f, id, g);
    const auto [lo, hi] = function_range(lg.f);
    CHECK(lo >= std::log(1.0) - 1e-15);
    CHECK(hi <= std::log(3.0) + 1e-15);
    CHECK(lg.f(0.0) == doctest::Approx(std::log(2.0)));
    try {
      compose_pair(monotone_catalog("sqrt", {{"hi", 1.0}}), f, id, g);
      FAIL("expected containment");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Containment);
    }
  }

  TEST_CASE("composition positivity") {
    const Grid grid(24.0, 1024);
    const RealFunction f = tanh_affine(1.0, kPi / 2.0), g = tanh_affine(1.0, 1.0);
    const MonotoneFunction id = monotone_catalog("identity");
    CHECK(composition_positivity_experiment(monotone_catalog("log", {{"c", 2.0}}), f, id, g, grid).positive);
    const SpectralReport base = composition_positivity_experiment(id, f, id, g, grid);
    CHECK(base.max_eig == doctest::Approx(2.0 / kPi).epsilon(1e-4));
    const SpectralReport sq = composition_positivity_experiment(monotone_catalog("square"), f, id, g, grid);
    CHECK_FALSE(sq.positive);
    CHECK(sq.min_eig < -1e-3);
  }
}
