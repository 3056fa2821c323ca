#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "hk/commutator.hpp"

namespace hk {

namespace {

double hermiticity_error(const Eigen::MatrixXcd& m) {
  double e = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i) e = std::max(e, std::abs(m(i, j) - std::conj(m(j, i))));
  return e;
}

bool is_real(const Eigen::MatrixXcd& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

// Divide-and-conquer symmetric/Hermitian eigensolvers; ascending eigenvalues.
Eigen::VectorXd hermitian_eig(const Eigen::MatrixXcd& m, Eigen::MatrixXcd* vectors) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  Eigen::VectorXd w(n);
  const char job = vectors ? 'V' : 'N';
  lapack_int info = 0;
  if (is_real(m)) {
    Eigen::MatrixXd a = m.real();
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, job, 'L', n, a.data(), n, w.data());
    if (vectors) *vectors = a.cast<cplx>();
  } else {
    Eigen::MatrixXcd a = m;
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, job, 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                          w.data());
    if (vectors) *vectors = std::move(a);
  }
  if (info != 0) {
    std::ostringstream os;
    os << "eigensolver failed (info = " << info << ")";
    throw AccuracyError(ErrorKind::Accuracy, os.str(), static_cast<double>(info));
  }
  return w;
}

}  // namespace

SpectralReport spectrum(const DiscretizedOperator& op, const SpectrumOptions& opts) {
  SpectralReport r;
  r.rank_threshold = opts.rank_threshold;
  r.positivity_tolerance = opts.positivity_tolerance;
  r.hermiticity_error = hermiticity_error(op.matrix);
  const double scale = std::max(1.0, op.matrix.cwiseAbs().maxCoeff());
  if (r.hermiticity_error > opts.hermiticity_tolerance * scale) {
    std::ostringstream os;
    os << "spectrum: matrix is not Hermitian (max |M - M*| = " << r.hermiticity_error << ")";
    fail(ErrorKind::Contract, os.str());
  }

  const Eigen::VectorXd ev = hermitian_eig(op.matrix, nullptr);
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), std::greater<>());

  r.trace = op.matrix.trace().real();
  if (!r.eigenvalues.empty()) {
    r.max_eig = r.eigenvalues.front();
    r.min_eig = r.eigenvalues.back();
  }
  r.max_abs_eig = std::max(std::abs(r.max_eig), std::abs(r.min_eig));
  for (double l : r.eigenvalues)
    if (std::abs(l) > opts.rank_threshold * r.max_abs_eig) ++r.numerical_rank;
  r.positive = r.min_eig >= -opts.positivity_tolerance * r.max_abs_eig;
  return r;
}

Eigensystem eigensystem(const DiscretizedOperator& op) {
  Eigen::MatrixXcd vec;
  const Eigen::VectorXd val = hermitian_eig(op.matrix, &vec);
  Eigensystem out;
  out.values = val.reverse();
  out.vectors = vec.rowwise().reverse();
  return out;
}

IdentityCheck trace_identity_check(const DiscretizedOperator& op) {
  if (op.route == OperatorRoute::Direct)
    fail(ErrorKind::RouteMismatch,
         "trace_identity_check: the direct route is a finite commutator and has trace zero by construction");
  IdentityCheck c;
  c.lhs = op.matrix.trace().real();
  c.rhs = op.f_bracket * op.g_bracket / (2.0 * kPi);
  c.error = std::abs(c.lhs - c.rhs) / (c.rhs != 0.0 ? std::abs(c.rhs) : 1.0);
  return c;
}

cplx shifted_trace(const DiscretizedOperator& op, cplx x, cplx y) {
  if (op.route != OperatorRoute::NystromP)
    fail(ErrorKind::RouteMismatch, "shifted_trace: needs the momentum-space operator");
  require(std::isfinite(op.g_bracket) && op.g_bracket != 0.0, "shifted_trace: [g] must be nonzero");
  const int n = static_cast<int>(op.nodes.size());
  const cplx shift = x - y;
  double peak = 0.0;
  std::vector<cplx> terms(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    terms[static_cast<std::size_t>(m)] =
        op.matrix(m, m).real() * std::exp(cplx(0, 1) * op.nodes[static_cast<std::size_t>(m)] * shift);
    peak = std::max(peak, std::abs(terms[static_cast<std::size_t>(m)]));
  }
  const double edge = std::max(std::abs(terms.front()), std::abs(terms.back()));
  if (!std::isfinite(peak) || edge > 1e-10 * peak) {
    std::ostringstream os;
    os << "shifted_trace: exponential weight at Im(x - y) = " << shift.imag()
       << " is outside the moment-finite strip (edge/peak = " << edge / peak << ")";
    fail(ErrorKind::Divergence, os.str());
  }
  cplx s = 0.0;
  for (const cplx& t : terms) s += t;
  return kSqrt2Pi / op.g_bracket * s;
}

StripReport strip_positivity_check(const RealFunction& f, const RealFunction& g, double y, const Grid& grid,
                                   const StripOptions& opts) {
  require(y > 0.0, "strip_positivity_check: y must be positive");
  require(opts.x_points >= 2, "strip_positivity_check: need at least two lattice points");
  StripReport r;
  r.y = y;
  r.pole_proximity = y >= opts.pole_margin * g.strip_half_width();
  (void)g.eval(cplx(0.0, y));

  const FourierProfile fhat = fourier_deriv(f, grid);
  const double fhat2iy = fhat(cplx(0.0, 2.0 * y)).real();
  const DiscretizedOperator op = build_nystrom_p(f, g, grid);
  const double w = grid.momentum_spacing();
  const int n = grid.size();

  r.max_residual = 0.0;
  r.min_im_g = kInf;
  r.min_lhs = kInf;
  Eigen::VectorXcd u(n);
  for (int ix = 0; ix < opts.x_points; ++ix) {
    const double x = -opts.x_extent + 2.0 * opts.x_extent * ix / (opts.x_points - 1);
    const cplx z(x, y);
    for (int m = 0; m < n; ++m) u(m) = std::exp(cplx(0, -1) * z * op.nodes[static_cast<std::size_t>(m)]);
    const double lhs = (w / (2.0 * kPi)) * u.dot(op.matrix * u).real();
    const double img = g.eval(z).imag();
    const double rhs = img / y * fhat2iy / kSqrt2Pi;
    r.xs.push_back(x);
    r.lhs.push_back(lhs);
    r.rhs.push_back(rhs);
    r.im_g.push_back(img);
    r.max_residual = std::max(r.max_residual, std::abs(lhs - rhs));
    r.min_im_g = std::min(r.min_im_g, img);
    r.min_lhs = std::min(r.min_lhs, lhs);
  }
  return r;
}

}  // namespace hk
