#include <cmath>

#include "doctest.h"

#include "hk/commutator.hpp"

using namespace hk;

namespace {

const RealFunction kF = tanh_affine(1.0, kPi / 2.0);
const RealFunction kG = tanh_affine(1.0, 1.0);

}  // namespace

TEST_SUITE("commutator") {
  TEST_CASE("position kernel: diagonal at the origin and Hermiticity") {
    const Grid g(24.0, 1024);
    const DiscretizedOperator op = build_nystrom_x(kF, kG, g);
    CHECK(op.matrix(512, 512).real() == doctest::Approx(g.spacing() / kPi).epsilon(1e-10));
    CHECK((op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(op.kernel_value(512, 512).real() == doctest::Approx(1.0 / kPi).epsilon(1e-10));
  }

  TEST_CASE("constant f or g gives the zero matrix") {
    const Grid g(24.0, 256);
    CHECK(build_nystrom_x(constant_function(0.4), kG, g).matrix.norm() == 0.0);
    CHECK(build_nystrom_x(kF, constant_function(-1.0), g).matrix.norm() == 0.0);
    CHECK(build_nystrom_p(constant_function(2.0), kG, g).matrix.norm() == 0.0);
  }

  TEST_CASE("momentum kernel diagonal identity") {
    const Grid g(24.0, 1024);
    const DiscretizedOperator op = build_nystrom_p(kF, kG, g);
    for (int m = 256; m < 768; m += 37) {
      const double xi = g.momentum(m);
      CHECK(op.kernel_value(m, m).real() == doctest::Approx(2.0 / (2.0 * kPi) * kF.derivative(xi)).epsilon(1e-8));
    }
  }

  TEST_CASE("swap symmetry between the two Nystrom routes") {
    const Grid g(24.0, 512);
    const RealFunction f = sum_of({tanh_affine(1.0, kPi / 2.0), tanh_affine(0.5, kPi)});
    const SpectralReport a = spectrum(build_nystrom_p(f, kG, g));
    const SpectralReport b = spectrum(build_nystrom_x(reflect(kG), f, g));
    for (int i = 0; i < 5; ++i) CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) < 1e-6 * a.max_abs_eig);
  }

  TEST_CASE("Kato pair is rank one with lambda1 = 2/pi") {
    const Grid g(24.0, 2048);
    const DiscretizedOperator op = build_nystrom_x(kF, kG, g);
    const SpectralReport sp = spectrum(op);
    CHECK(sp.numerical_rank == 1);
    CHECK(sp.max_eig == doctest::Approx(2.0 / kPi).epsilon(1e-6));
    CHECK(sp.positive);
    const IdentityCheck id = trace_identity_check(op);
    CHECK(id.rhs == doctest::Approx(2.0 / kPi).epsilon(1e-15));
    CHECK(id.error < 1e-6);
  }

  TEST_CASE("eigenvalues sum to the trace") {
    const Grid g(20.0, 256);
    const DiscretizedOperator op = build_nystrom_x(arctan_affine(1.0, 0.5), kG, g);
    const SpectralReport sp = spectrum(op);
    double s = 0.0;
    for (double l : sp.eigenvalues) s += l;
    CHECK(s == doctest::Approx(op.matrix.trace().real()).epsilon(1e-10));
    CHECK(std::is_sorted(sp.eigenvalues.rbegin(), sp.eigenvalues.rend()));
  }

  TEST_CASE("zero operator has rank zero and is positive") {
    const SpectralReport sp = spectrum(build_nystrom_x(constant_function(1.0), kG, Grid(10.0, 128)));
    CHECK(sp.numerical_rank == 0);
    CHECK(sp.positive);
  }

  TEST_CASE("direct route: exact zero trace, periodic zero pair, interior agreement") {
    const Grid g(20.0, 1024);
    const DiscretizedOperator d = build_direct(kF, kG, g);
    CHECK(d.structural_trace == 0.0);
    const DiscretizedOperator x = build_nystrom_x(kF, kG, g);
    double worst = 0.0;
    for (int i = 256; i < 768; ++i)
      for (int j = 256; j < 768; ++j) worst = std::max(worst, std::abs(d.matrix(i, j) - x.matrix(i, j)));
    CHECK(worst < 1e-4);
    CHECK_THROWS_AS(trace_identity_check(d), Error);

    const DiscretizedOperator z = build_direct(sine_function(1.0, 1.0), sine_function(1.0, 2.0 * kPi), Grid(16.0, 1024));
    CHECK(z.matrix.norm() < 1e-8);
  }

  TEST_CASE("literal single-grid direct commutator shows the Nyquist artifact") {
    BuildOptions o;
    o.oversample = 1;
    const Grid g(20.0, 512);
    const DiscretizedOperator d = build_direct(kF, kG, g, o);
    const DiscretizedOperator x = build_nystrom_x(kF, kG, g);
    double worst = 0.0;
    for (int i = 128; i < 384; ++i)
      for (int j = 128; j < 384; ++j) worst = std::max(worst, std::abs(d.matrix(i, j) - x.matrix(i, j)));
    CHECK(worst > 1e-3);
  }

  TEST_CASE("shifted trace reproduces the derivative transform") {
    const Grid g(24.0, 2048);
    const DiscretizedOperator p = build_nystrom_p(kG, kG, g);
    const FourierProfile fh = FourierProfile::closed_form(kG);
    CHECK(std::abs(shifted_trace(p, 0.0, 0.0) - 2.0 / kSqrt2Pi) < 1e-10);
    CHECK(std::abs(shifted_trace(p, 1.0, 0.0) - fh(-1.0)) < 1e-6);
    CHECK(std::abs(shifted_trace(p, 0.0, cplx(0.0, 0.8)) - fh(cplx(0.0, 0.8))) < 1e-5 * std::abs(fh(cplx(0.0, 0.8))));
    try {
      shifted_trace(p, 0.0, cplx(0.0, 2.5));
      FAIL("expected divergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Divergence);
    }
    CHECK_THROWS_AS(shifted_trace(build_nystrom_x(kG, kG, Grid(10.0, 64)), 0.0, 0.0), Error);
  }

  TEST_CASE("strip identity and Herglotz sign for the Kato pair") {
    const Grid g(24.0, 2048);
    for (double y : {0.2, 0.3, 0.5, 1.0}) {
      const StripReport r = strip_positivity_check(kF, kG, y, g);
      CHECK(r.max_residual < 1e-8);
      CHECK(r.min_im_g >= 0.0);
      CHECK(r.min_lhs >= -1e-8);
      CHECK_FALSE(r.pole_proximity);
    }
    const StripReport near = strip_positivity_check(kF, tanh_affine(1.0, 2.0), 0.75, g);
    CHECK(near.pole_proximity);
    CHECK(near.min_im_g >= 0.0);
  }
}
