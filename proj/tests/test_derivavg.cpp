#include <cmath>

#include "doctest.h"

#include "hk/derivavg.hpp"

using namespace hk;

TEST_SUITE("derivavg") {
  TEST_CASE("averaging weight") {
    CHECK(averaging_weight_integral() == doctest::Approx(1.0).epsilon(1e-10));
    for (double w : {0.05, 0.3, 0.6, 0.85}) {
      CHECK(averaging_weight(w) >= 0.0);
      CHECK(averaging_weight(w) == doctest::Approx(averaging_weight_series(w, 400)).epsilon(1e-12));
    }
    // Independent midpoint quadrature of the weight.
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) s += averaging_weight((i + 0.5) / n);
    CHECK(s / n == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("averaged quotient examples") {
    const RealFunction g = tanh_affine(1.0, 1.0);
    CHECK(averaged_quotient(g, 0.0, 0.1) == doctest::Approx(1.0).epsilon(0.01));
    const RealFunction lin = sampled_function({-3, -2, -1, 0, 1, 2, 3}, {-6, -4, -2, 0, 2, 4, 6});
    for (double x : {-1.0, 0.0, 0.4})
      for (double r : {0.3, 0.05}) CHECK(averaged_quotient(lin, x, r) == doctest::Approx(2.0).epsilon(1e-12));
    const RealFunction cosine = sine_function(1.0, 1.0, -kPi / 2.0);
    CHECK(std::abs(averaged_quotient(cosine, 0.0, 0.1)) < 1e-12);
  }

  TEST_CASE("second-order convergence") {
    const std::vector<double> xs = {-1.0, -0.3, 0.0, 0.4, 1.2};
    const std::vector<double> radii = {0.2, 0.1, 0.05, 0.025};
    const ConvergenceReport a = convergence_study(tanh_affine(1.0, 1.0), xs, radii);
    CHECK(a.slope >= 1.8);
    CHECK(a.slope <= 2.2);
    const ConvergenceReport b = convergence_study(tanh_affine(1.0, 5.0), xs, radii);
    CHECK(b.slope >= 1.8);
    CHECK(b.slope <= 2.2);
    CHECK(b.constant > a.constant);
    for (std::size_t i = 1; i < a.errors.size(); ++i) CHECK(a.errors[i] < a.errors[i - 1]);
  }
}
