#include <cmath>
#include <random>

#include "doctest.h"

#include "hk/funcspace.hpp"

using namespace hk;

namespace {

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double sech2(double t) {
  const double s = 1.0 / std::cosh(t);
  return s * s;
}

}  // namespace

TEST_SUITE("funcspace") {
  TEST_CASE("tanh-affine is odd at the origin and has limits c +- d") {
    const RealFunction f = tanh_affine(1.0, 1.0);
    CHECK(f(0.0) == 0.0);
    const RealFunction h = tanh_affine(2.0, 3.0, 0.5, 1.0);
    CHECK(h.limit_at_plus_infinity() == doctest::Approx(3.0));
    CHECK(h.limit_at_minus_infinity() == doctest::Approx(-1.0));
    CHECK(h.bracket().value == doctest::Approx(4.0));
  }

  TEST_CASE("single-atom measure tends to its total weight") {
    const TanhMeasure m({{0.0, 1.0}}, 0.0, kPi / 2.0);
    CHECK(m.value(50.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.total_weight() == 1.0);
    CHECK(m.alpha() * m.rate() == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  }

  TEST_CASE("tanh continues to i tan y on the imaginary axis") {
    const RealFunction f = tanh_affine(1.0, 1.0);
    const cplx v = f.eval(cplx(0.0, kPi / 4.0));
    CHECK(std::abs(v - cplx(0.0, 1.0)) < 1e-15);
    // Series tanh z = sum 2z / (z^2 + (k - 1/2)^2 pi^2) as an independent oracle.
    const cplx z(0.3, 0.4);
    cplx s = 0.0;
    for (int k = 1; k <= 200000; ++k) s += 2.0 * z / (z * z + std::pow((k - 0.5) * kPi, 2));
    CHECK(std::abs(f.eval(z) - s) < 1e-5);
  }

  TEST_CASE("measure evaluation matches the defining sum") {
    const TanhMeasure m({{-1.0, 0.3}, {0.5, 0.7}}, 0.2, 0.8);
    const double a = m.rate();
    for (double t : {-3.0, -0.4, 0.0, 1.7}) {
      const double want = 0.3 * std::tanh(a * (t + 1.0)) + 0.7 * std::tanh(a * (t - 0.5)) + 0.2;
      CHECK(m.value(t) == doctest::Approx(want).epsilon(1e-14));
    }
  }

  TEST_CASE("increasing catalog entries are monotone on random pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    const std::vector<RealFunction> fs = {tanh_affine(1.0, 1.0), arctan_affine(2.0, 0.5, 1.0),
                                          from_measure(TanhMeasure({{0.0, 1.0}, {2.0, 0.5}}, 0.0, 1.0)),
                                          sum_of({tanh_affine(1.0, kPi / 2.0), tanh_affine(0.5, kPi)})};
    for (const RealFunction& f : fs) {
      CHECK(f.claims_increasing());
      for (int i = 0; i < 200; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        CHECK(f(b) >= f(a));
        CHECK(std::abs(f(b)) <= f.sup_bound() + 1e-15);
      }
    }
  }

  TEST_CASE("difference quotient agrees with plain differences where they are accurate") {
    const std::vector<RealFunction> fs = {tanh_affine(1.5, 2.0, 0.3), arctan_affine(1.0, 0.7, -0.2)};
    for (const RealFunction& f : fs) {
      for (double s : {-2.0, -0.1, 0.4, 3.0})
        for (double t : {-1.0, 0.2, 2.5}) {
          const double plain = (f(s) - f(t)) / (s - t);
          CHECK(f.difference_quotient(s, t) == doctest::Approx(plain).epsilon(1e-10));
        }
      CHECK(f.difference_quotient(0.7, 0.7) == doctest::Approx(f.derivative(0.7)).epsilon(1e-12));
    }
  }

  TEST_CASE("reflection gives -f(-t)") {
    const RealFunction f = tanh_affine(1.0, 1.0, 0.5, 0.2);
    const RealFunction r = reflect(f);
    for (double t : {-2.0, 0.0, 1.3}) CHECK(r(t) == doctest::Approx(-f(-t)).epsilon(1e-15));
  }

  TEST_CASE("cosh mollifier of tanh 10t") {
    const TanhMeasure m = cosh_mollify(tanh_affine(1.0, 10.0), 0.1);
    CHECK(m.alpha() == doctest::Approx(kPi / 20.0).epsilon(1e-15));
    CHECK(m.total_weight() == doctest::Approx(1.0).epsilon(1e-8));
    for (const Atom& a : m.atoms()) CHECK(a.weight >= 0.0);
  }

  TEST_CASE("cosh mollifier preserves odd symmetry and unit kernel mass") {
    const TanhMeasure m = cosh_mollify(tanh_affine(1.0, 1.0), 0.05);
    CHECK(std::abs(m.value(0.0)) < 1e-12);
    // Unit mass: mollifying a constant-plus-step keeps the limits.
    const TanhMeasure s = cosh_mollify(tanh_affine(3.0, 1.0, 0.0, 2.0), 0.3);
    CHECK(s.value(60.0) == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(s.value(-60.0) == doctest::Approx(-1.0).epsilon(1e-8));
  }

  TEST_CASE("cosh mollifier rejects decreasing and undecayed input") {
    CHECK_THROWS_AS(cosh_mollify(tanh_affine(-1.0, 1.0), 0.1), Error);
    try {
      cosh_mollify(arctan_affine(1.0, 1.0), 0.1);
      FAIL("expected truncation");
    } catch (const AccuracyError& e) {
      CHECK(e.kind() == ErrorKind::Truncation);
      CHECK(e.achieved() > 0.0);
    }
  }

  TEST_CASE("gaussian mollifier examples") {
    const RealFunction c = gaussian_mollify(constant_function(1.0), 0.5);
    CHECK(c(0.3) == doctest::Approx(1.0).epsilon(1e-12));
    const RealFunction t = gaussian_mollify(tanh_affine(1.0, 1.0), 0.5);
    CHECK(std::abs(t(0.0)) < 1e-14);
    double sup = 0.0;
    for (int i = -400; i <= 400; ++i) sup = std::max(sup, std::abs(t(i * 0.05)));
    CHECK(sup <= 1.0);
    // Oracle: direct Simpson convolution.
    const double want = simpson([](double s) { return std::exp(-s * s / 0.5) / std::sqrt(0.5 * kPi) * std::tanh(0.7 - s); },
                                -8.0, 8.0, 4000);
    CHECK(t(0.7) == doctest::Approx(want).epsilon(1e-10));
  }

  TEST_CASE("exponential moments of tanh") {
    auto d = [](double t) { return sech2(t); };
    const MomentResult m0 = exp_moment(d, 0.0, 30.0);
    CHECK(m0.value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_FALSE(m0.divergent);
    const MomentResult a = exp_moment(d, 0.9, 40.0);
    const MomentResult b = exp_moment(d, 0.9, 60.0);
    CHECK_FALSE(a.divergent);
    CHECK(a.value + a.tail_estimate == doctest::Approx(b.value + b.tail_estimate).epsilon(1e-6));
    // Exact: int sech^2 t e^{2bt} dt = 2 pi b / sin(pi b) for |b| < 1.
    CHECK(b.value + b.tail_estimate == doctest::Approx(2.0 * kPi * 0.9 / std::sin(kPi * 0.9)).epsilon(1e-6));
    for (double w : {20.0, 30.0, 40.0}) CHECK(exp_moment(d, 1.1, w).divergent);
  }

  TEST_CASE("decay rate estimation") {
    CHECK(estimate_decay_rate([](double t) { return sech2(t); }).rate == doctest::Approx(1.0).epsilon(0.02));
    CHECK(estimate_decay_rate([](double t) { return 2.0 * sech2(2.0 * t); }, 12.0).rate ==
          doctest::Approx(2.0).epsilon(0.02));
    try {
      estimate_decay_rate([](double t) { return 2.0 / (4.0 + t * t); });
      FAIL("expected fit-quality");
    } catch (const AccuracyError& e) {
      CHECK(e.kind() == ErrorKind::FitQuality);
    }
  }

  TEST_CASE("Herglotz check") {
    const HerglotzReport a = herglotz_check(tanh_affine(1.0, 1.0), kPi / 2.0, 30);
    CHECK(a.pass);
    CHECK(a.min_imag >= 0.0);
    const RealFunction m = from_measure(TanhMeasure({{-2.0, 0.4}, {0.3, 0.1}, {1.0, 0.5}}, -0.3, 0.9));
    CHECK(herglotz_check(m, 0.9, 30).pass);
    CHECK_FALSE(herglotz_check(tanh_affine(1.0, 2.0), kPi / 2.0, 30).pass);
  }

  TEST_CASE("NNLS recovers a nonnegative solution") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    const int rows = 40, cols = 8;
    std::vector<double> a(rows * cols), x = {0.0, 1.5, 0.0, 0.2, 0.0, 0.0, 3.0, 0.7}, b(rows, 0.0);
    for (double& v : a) v = n01(rng);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) b[i] += a[j * rows + i] * x[j];
    const NnlsResult r = nnls(a, rows, cols, b);
    CHECK(r.converged);
    for (int j = 0; j < cols; ++j) CHECK(r.x[j] == doctest::Approx(x[j]).epsilon(1e-9));
  }

  TEST_CASE("measure fitting") {
    std::vector<double> t, two, one, steep, grid;
    for (int i = -1200; i <= 1200; ++i) {
      t.push_back(i * 0.01);
      two.push_back(0.5 * std::tanh(t.back() + 1.0) + 0.5 * std::tanh(t.back() - 1.0));
      one.push_back(std::tanh(t.back()));
      steep.push_back(std::tanh(2.0 * t.back()));
    }
    for (int i = -16; i <= 16; ++i) grid.push_back(0.25 * i);

    const MeasureFit a = fit_tanh_measure(t, two, kPi / 2.0, grid);
    CHECK(a.member);
    CHECK(a.residual < 1e-6);
    REQUIRE(a.effective_atoms.size() == 2);
    CHECK(a.effective_atoms[0].location == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(a.effective_atoms[1].location == doctest::Approx(1.0).epsilon(0.05));
    for (const Atom& x : a.effective_atoms) CHECK(std::abs(x.weight - 0.5) < 1e-2);

    const MeasureFit b = fit_tanh_measure(t, one, kPi / 2.0, grid);
    REQUIRE(b.effective_atoms.size() == 1);
    CHECK(std::abs(b.effective_atoms[0].location) < 0.05);
    CHECK(b.effective_atoms[0].weight == doctest::Approx(1.0).epsilon(1e-6));

    const MeasureFit c = fit_tanh_measure(t, steep, kPi / 2.0, grid);
    CHECK_FALSE(c.member);
  }

  TEST_CASE("sample files") {
    const RealFunction s = read_samples(std::string(HKLAB_TEST_DATA) + "/tanh-coarse.txt");
    CHECK(s(0.0) == doctest::Approx(0.0));
    CHECK(s(1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-9));
    CHECK_THROWS_AS(read_samples(std::string(HKLAB_TEST_DATA) + "/missing.txt"), Error);
  }
}
