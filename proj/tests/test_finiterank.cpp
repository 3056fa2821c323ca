#include <cmath>

#include "doctest.h"

#include "hk/finiterank.hpp"

using namespace hk;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e += (a[i] - b[i]) * (a[i] - b[i]);
    n += b[i] * b[i];
  }
  return std::sqrt(e / n);
}

}  // namespace

TEST_SUITE("finiterank") {
  TEST_CASE("rank-one family") {
    const FunctionPair p = kato_rank_one_pair(2.0, 1.5, 0.5, 1.0, -1.0);
    CHECK(p.f.bracket().value == doctest::Approx(3.0));
    CHECK(p.g.bracket().value == doctest::Approx(1.0));
    CHECK(p.f.derivative(1.0) == doctest::Approx(1.5 * kPi / 4.0));
    try {
      kato_rank_one_pair(1.0, 1.0, -1.0);
      FAIL("expected sign constraint");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SignConstraint);
    }
  }

  TEST_CASE("rank-one translations and scaling") {
    const Grid g(24.0, 1024);
    const SpectralReport a = spectrum(build_nystrom_x(kato_rank_one_pair(1.0, 1.0, 1.0).f, kato_rank_one_pair(1.0, 1.0, 1.0).g, g));
    const FunctionPair s = kato_rank_one_pair(1.0, 1.0, 1.0, 3.0, -2.0);
    const SpectralReport b = spectrum(build_nystrom_x(s.f, s.g, g));
    CHECK(std::abs(a.max_eig - b.max_eig) < 1e-8);
    const FunctionPair c = kato_rank_one_pair(1.0, 2.0, 0.75);
    const SpectralReport sc = spectrum(build_nystrom_x(c.f, c.g, g));
    CHECK(sc.numerical_rank == 1);
    CHECK(std::abs(sc.max_eig - 2.0 * 2.0 * 0.75 / kPi) < 1e-4);
    const FunctionPair d = kato_rank_one_pair(1.0, 1.0, 1.0);
    const SpectralReport sd = spectrum(build_nystrom_x(tanh_affine(1.0, 1.1 * kPi / 2.0), d.g, g));
    CHECK(sd.numerical_rank > 1);
  }

  TEST_CASE("rank-three example") {
    const Grid g(24.0, 2048);
    for (double beta : {0.5, 1.0, 2.0}) {
      const Rank3Example ex = rank3_example(beta, g);
      const DiscretizedOperator op = build_nystrom_x(ex.pair.f, ex.pair.g, g);
      const SpectralReport sp = spectrum(op);
      CHECK(sp.numerical_rank == 3);
      int neg = 0;
      for (double l : sp.eigenvalues)
        if (l < -1e-6 * sp.max_abs_eig) ++neg;
      CHECK(neg == 1);
      CHECK(sp.min_eig == doctest::Approx(-(beta / kPi) * (kPi - 2.0) / 2.0).epsilon(1e-6));
      const auto& phi = ex.model.factors;
      CHECK(inner_product(op.weights, phi[0], phi[0]).real() == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(inner_product(op.weights, phi[1], phi[1]).real() == doctest::Approx((kPi + 2.0) / 2.0).epsilon(1e-10));
      const double n2 = inner_product(op.weights, phi[2], phi[2]).real();
      CHECK(n2 == doctest::Approx((kPi - 2.0) / 2.0).epsilon(1e-10));
      CHECK(std::abs(inner_product(op.weights, phi[0], phi[2])) < 1e-12);
      CHECK(quadratic_form(op, phi[2]) == doctest::Approx(-(beta / kPi) * n2 * n2).epsilon(1e-6));
      CHECK(sp.trace == doctest::Approx(2.0 * (1.0 + beta) / kPi).epsilon(1e-6));
      CHECK((ex.model.assemble() - op.matrix).cwiseAbs().maxCoeff() < 1e-6 * g.spacing());
      CHECK_THROWS_AS(reconstruct_gprime(ex.model, ex.pair.f.bracket()), Error);
      CHECK_THROWS_AS(reconstruct_fprime(ex.model, g, ex.pair.g.bracket()), Error);
    }
  }

  TEST_CASE("reconstructions from the rank-one model") {
    const Grid g(24.0, 2048);
    const FunctionPair p = kato_rank_one_pair(1.0, 1.0, 1.0);
    const FiniteRankModel m = model_from_operator(build_nystrom_x(p.f, p.g, g));
    REQUIRE(m.rank() == 1);
    std::vector<double> gw, fw;
    for (int j = 0; j < g.size(); ++j) {
      gw.push_back(1.0 / std::pow(std::cosh(g.node(j)), 2));
      fw.push_back(kPi / 2.0 / std::pow(std::cosh(kPi * g.momentum(j) / 2.0), 2));
    }
    const auto gp = reconstruct_gprime(m, p.f.bracket());
    CHECK(rel_l2(gp, gw) < 1e-6);
    CHECK(rel_l2(reconstruct_fprime(m, g, p.g.bracket()), fw) < 1e-6);

    FiniteRankModel twice = m;
    for (double& c : twice.coefficients) c *= 2.0;
    const auto g2 = reconstruct_gprime(twice, {2.0 * p.f.bracket().value});
    for (std::size_t j = 0; j < gp.size(); ++j) CHECK(g2[j] == doctest::Approx(gp[j]).epsilon(1e-14));

    FiniteRankModel zero = m;
    zero.factors.clear();
    zero.coefficients.clear();
    for (double v : reconstruct_fprime(zero, g, p.g.bracket())) CHECK(v == 0.0);
  }

  TEST_CASE("gamma recovery") {
    const Grid g(24.0, 2048);
    const Rank3Example ex = rank3_example(1.0, g);
    const DiscretizedOperator op = build_nystrom_x(ex.pair.f, ex.pair.g, g);
    const FourierProfile fh = fourier_deriv(ex.pair.f, g);
    const GammaRecovery r = gamma_recover(op, ex.pair.g, fh, {{0.0, 1.1, -0.7}}, {{0.5, -1.3, 2.1}});
    CHECK(r.model.rank() == 3);
    CHECK(r.reassembly_error < 1e-6);
    CHECK(r.consistency_angle >= 0.0);
    CHECK(r.consistency_angle < 1e-5);
    const auto ang = principal_angles(op.weights, r.model.factors, ex.model.factors);
    CHECK(ang.back() < 1e-5);
    int neg = 0;
    for (double c : r.model.coefficients) neg += c < 0.0;
    CHECK(neg == 1);

    try {
      gamma_recover(op, ex.pair.g, fh, {{0.0, 1.0, 1.0 + 1e-13}}, {{0.5, 0.5 + 1e-13, -1.0}});
      FAIL("expected probe-selection");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ProbeSelection);
    }
    CHECK_THROWS_AS(gamma_recover(op, ex.pair.g, fh, {{0.0, 1.0, 2.0}}, {{0.0, -1.0, 1.5}}), Error);

    const FunctionPair p = kato_rank_one_pair(1.0, 1.0, 1.0);
    const DiscretizedOperator o1 = build_nystrom_x(p.f, p.g, g);
    const GammaRecovery r1 = gamma_recover(o1, p.g, fourier_deriv(p.f, g), {{0.0}}, {{0.5}});
    CHECK(r1.reassembly_error < 1e-6);
  }

  TEST_CASE("principal angles") {
    const Grid g(8.0, 64);
    const auto w = quadrature_weights(g);
    Eigen::VectorXcd a(64), b(64), c(64);
    for (int j = 0; j < 64; ++j) {
      const double x = g.node(j);
      a(j) = std::exp(-x * x);
      b(j) = x * std::exp(-x * x);
      c(j) = std::exp(-x * x / 4.0);
    }
    const auto same = principal_angles(w, {a, b}, {a + b, cplx(0.0, 2.0) * (a - b)});
    CHECK(same.back() < 1e-12);
    const auto ortho = principal_angles(w, {a}, {b});
    CHECK(ortho.back() == doctest::Approx(kPi / 2.0).epsilon(1e-10));
    const auto some = principal_angles(w, {a}, {c});
    CHECK(some.back() > 0.1);
  }

  TEST_CASE("strip estimates and the product bound") {
    const Grid g(24.0, 2048);
    const DecayStrip s = estimate_strip(tanh_affine(1.0, 1.0), g);
    CHECK(s.strip == doctest::Approx(kPi / 2.0).epsilon(0.05));
    const Rank3Example ex = rank3_example(1.0, g);
    const StripProduct p = strip_product_diagnostic(ex.pair.f, ex.pair.g, g);
    CHECK(p.product == doctest::Approx(kPi / 4.0).epsilon(0.05));
    CHECK(p.within_bound);
    CHECK(p.f_moment_rate == doctest::Approx(kPi / 2.0).epsilon(0.02));
    CHECK(p.g_moment_rate == doctest::Approx(1.0).epsilon(0.02));
  }
}
