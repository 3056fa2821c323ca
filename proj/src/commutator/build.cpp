#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/commutator.hpp"

namespace hk {

std::string_view to_string(OperatorRoute route) {
  switch (route) {
    case OperatorRoute::NystromX: return "nystrom-x";
    case OperatorRoute::NystromP: return "nystrom-p";
    case OperatorRoute::Direct: return "direct";
  }
  return "?";
}

cplx DiscretizedOperator::kernel_value(int i, int j) const {
  return matrix(i, j) / std::sqrt(weights[static_cast<std::size_t>(i)] * weights[static_cast<std::size_t>(j)]);
}

namespace {

double bracket_or_nan(const RealFunction& fn) {
  try {
    return fn.bracket().value;
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// M_ij = w (2 pi)^{-1/2} (u(s_i) - u(s_j))/(s_i - s_j) T[j - i] on uniform nodes s.
Eigen::MatrixXcd assemble(const std::vector<double>& s, double w, const RealFunction& u,
                          const std::vector<cplx>& table) {
  const int n = static_cast<int>(s.size());
  const double c = w / kSqrt2Pi;
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    const double sj = s[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const double q = u.difference_quotient(s[static_cast<std::size_t>(i)], sj);
      if (i == j && !std::isfinite(q))
        fail(ErrorKind::DerivativeRequired, u.describe() + ": derivative unavailable on the diagonal");
      m(i, j) = c * q * table[static_cast<std::size_t>(j - i + n - 1)];
    }
  }
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  return h;
}

}  // namespace

DiscretizedOperator build_nystrom_x(const RealFunction& f, const RealFunction& g, const Grid& grid,
                                    const BuildOptions& opts) {
  const FourierProfile fhat = fourier_deriv(f, grid, opts.transform);
  const int n = grid.size();
  const double dx = grid.spacing();
  std::vector<cplx> table(static_cast<std::size_t>(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d) table[static_cast<std::size_t>(d + n - 1)] = fhat(d * dx);

  DiscretizedOperator op{grid, OperatorRoute::NystromX, {}, grid.nodes(), quadrature_weights(grid),
                         f.describe(), g.describe(), bracket_or_nan(f), bracket_or_nan(g), 0.0};
  op.matrix = assemble(op.nodes, dx, g, table);
  op.structural_trace = op.matrix.trace().real();
  return op;
}

DiscretizedOperator build_nystrom_p(const RealFunction& f, const RealFunction& g, const Grid& grid,
                                    const BuildOptions& opts) {
  const FourierProfile ghat = fourier_deriv(g, grid, opts.transform);
  const int n = grid.size();
  const double dk = grid.momentum_spacing();
  // K~(xi, eta) carries g'^(xi - eta) = g'^(-(j - i) dk).
  std::vector<cplx> table(static_cast<std::size_t>(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d) table[static_cast<std::size_t>(d + n - 1)] = ghat(-d * dk);

  DiscretizedOperator op{grid, OperatorRoute::NystromP, {}, grid.momenta(),
                         std::vector<double>(static_cast<std::size_t>(n), dk), f.describe(), g.describe(),
                         bracket_or_nan(f), bracket_or_nan(g), 0.0};
  op.matrix = assemble(op.nodes, dk, f, table);
  op.structural_trace = op.matrix.trace().real();
  return op;
}

namespace {

// Apply U (U_jm = e^{i k_m x_j} / sqrt N) to every column.
Eigen::MatrixXcd apply_u(const Grid& grid, const Eigen::MatrixXcd& a) {
  const int n = grid.size();
  Eigen::MatrixXcd out(n, a.cols());
  std::vector<cplx> col(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (int m = 0; m < n; ++m) col[static_cast<std::size_t>(m)] = a(m, c);
    const std::vector<cplx> v = inverse_unitary_dft(grid, col);
    for (int j = 0; j < n; ++j) out(j, c) = v[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace

DiscretizedOperator build_direct(const RealFunction& f, const RealFunction& g, const Grid& grid,
                                 const BuildOptions& opts) {
  require(opts.oversample >= 1, "build_direct: oversample must be >= 1");
  if (!is_power_of_two(grid.size())) fail(ErrorKind::Config, "build_direct: N must be a power of two");
  check_periodic(g, grid);

  const int n = grid.size();
  const int nf = n * opts.oversample;
  const Grid fine(grid.half_width(), nf);
  std::vector<cplx> gs(static_cast<std::size_t>(nf));
  for (int j = 0; j < nf; ++j) gs[static_cast<std::size_t>(j)] = g.value(fine.node(j));
  const std::vector<cplx> raw = fft_forward(gs);
  // G(d) = <e_m, g e_{m'}> for d = m - m', the band-limited Galerkin matrix of g(Q).
  std::vector<cplx> gd(static_cast<std::size_t>(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d) {
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;
    gd[static_cast<std::size_t>(d + n - 1)] = sign * raw[static_cast<std::size_t>(((d % nf) + nf) % nf)] /
                                              static_cast<double>(nf);
  }

  std::vector<double> fk(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) fk[static_cast<std::size_t>(m)] = f.value(grid.momentum(m));

  Eigen::MatrixXcd mm(n, n);
  double diag = 0.0;
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      mm(a, b) = cplx(0, 1) * (fk[static_cast<std::size_t>(a)] - fk[static_cast<std::size_t>(b)]) *
                 gd[static_cast<std::size_t>(a - b + n - 1)];
    }
    diag += mm(b, b).real();
  }

  // M = U Mm U^dagger = (U (U Mm)^dagger)^dagger.
  const Eigen::MatrixXcd a = apply_u(grid, mm);
  const Eigen::MatrixXcd adj = a.adjoint();
  const Eigen::MatrixXcd m = apply_u(grid, adj).adjoint();

  DiscretizedOperator op{grid, OperatorRoute::Direct, 0.5 * (m + m.adjoint()), grid.nodes(),
                         quadrature_weights(grid), f.describe(), g.describe(), bracket_or_nan(f),
                         bracket_or_nan(g), diag};
  return op;
}

}  // namespace hk
