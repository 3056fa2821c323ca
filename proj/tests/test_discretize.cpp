#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "hk/discretize.hpp"

using namespace hk;

TEST_SUITE("discretize") {
  TEST_CASE("grid layout") {
    const Grid g(1.0, 4);
    CHECK(g.spacing() == 0.5);
    CHECK(g.node(0) == -1.0);
    CHECK(g.node(3) == 0.5);
    CHECK(g.momentum(2) == 0.0);
    CHECK(g.momentum_spacing() == doctest::Approx(kPi));
    CHECK_THROWS_AS(Grid(24.0, 1000), Error);
    CHECK_THROWS_AS(Grid(-1.0, 64), Error);
    CHECK(is_power_of_two(2048));
    CHECK_FALSE(is_power_of_two(1000));
  }

  TEST_CASE("weights sum to 2L") {
    for (auto [L, N] : {std::pair{1.0, 4}, std::pair{24.0, 2048}, std::pair{7.5, 128}}) {
      const auto w = quadrature_weights(Grid(L, N));
      CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2.0 * L).epsilon(1e-14));
    }
  }

  TEST_CASE("sech^2 integrates to 2") {
    const Grid g(24.0, 2048);
    const auto w = quadrature_weights(g);
    double s = 0.0;
    for (int j = 0; j < g.size(); ++j) s += w[j] / std::pow(std::cosh(g.node(j)), 2);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-10));
  }

  TEST_CASE("unitary DFT is unitary and inverts") {
    const Grid g(5.0, 64);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    std::vector<cplx> v(64);
    for (auto& x : v) x = cplx(n01(rng), n01(rng));
    const auto c = unitary_dft(g, v);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 64; ++i) {
      a += std::norm(v[i]);
      b += std::norm(c[i]);
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    const auto back = inverse_unitary_dft(g, c);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(back[i] - v[i]) < 1e-13);
  }

  TEST_CASE("continuous transform of a Gaussian") {
    const Grid g(12.0, 256);
    std::vector<cplx> s(256);
    for (int j = 0; j < 256; ++j) s[j] = std::exp(-0.5 * g.node(j) * g.node(j));
    const auto t = continuous_transform(g, s);
    for (int m = 100; m < 156; ++m) {
      const double k = g.momentum(m);
      CHECK(std::abs(t[m] - std::exp(-0.5 * k * k)) < 1e-12);
    }
  }

  TEST_CASE("derivative transform of tanh") {
    const RealFunction f = tanh_affine(1.0, 1.0);
    const Grid g(24.0, 2048);
    const FourierProfile a = FourierProfile::closed_form(f);
    CHECK(a(0.0).real() == doctest::Approx(2.0 / kSqrt2Pi).epsilon(1e-14));
    FourierOptions fft;
    fft.route = TransformRoute::FFT;
    const FourierProfile b = fourier_deriv(f, g, fft);
    CHECK(b.route() == TransformRoute::FFT);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double k = -10.0 + 0.1 * i;
      worst = std::max(worst, std::abs(a(k) - b(k)));
      const double closed = k == 0.0 ? 2.0 : kPi * k / std::sinh(kPi * k / 2.0);
      CHECK(std::abs(a(k) - closed / kSqrt2Pi) < 1e-14);
    }
    CHECK(worst < 1e-8 * a(0.0).real());

    // f'^(0.8 i) = int sech^2(t) e^{0.8 t} dt / sqrt(2 pi) by trapezoid quadrature.
    double q = 0.0;
    const double h = 0.002;
    for (int i = -20000; i <= 20000; ++i) q += std::exp(0.8 * i * h) / std::pow(std::cosh(i * h), 2);
    q *= h / kSqrt2Pi;
    CHECK(a(cplx(0.0, 0.8)).real() == doctest::Approx(q).epsilon(1e-10));
    CHECK(b(cplx(0.0, 0.8)).real() == doctest::Approx(q).epsilon(1e-8));
    CHECK_THROWS_AS(a(cplx(0.0, 2.5)), Error);
  }

  TEST_CASE("FFT route needs a decayed derivative") {
    FourierOptions fft;
    fft.route = TransformRoute::FFT;
    try {
      fourier_deriv(arctan_affine(1.0, 1.0), Grid(24.0, 512), fft);
      FAIL("expected truncation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Truncation);
    }
  }

  TEST_CASE("periodicity check") {
    CHECK_NOTHROW(check_periodic(tanh_affine(1.0, 1.0), Grid(24.0, 256)));
    CHECK_NOTHROW(check_periodic(sine_function(1.0, 2.0 * kPi), Grid(16.0, 256)));
    CHECK_THROWS_AS(check_periodic(sine_function(1.0, 1.0), Grid(16.0, 256)), Error);
    CHECK_THROWS_AS(check_periodic(arctan_affine(1.0, 1.0), Grid(24.0, 256)), Error);
  }
}
