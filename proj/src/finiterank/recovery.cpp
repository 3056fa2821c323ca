#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/finiterank.hpp"

namespace hk {

namespace {

Eigen::MatrixXcd orthonormal_basis(const std::vector<double>& weights, const std::vector<Eigen::VectorXcd>& v) {
  const Eigen::Index n = static_cast<Eigen::Index>(weights.size());
  Eigen::MatrixXcd a(n, static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k)
    for (Eigen::Index j = 0; j < n; ++j) a(j, static_cast<Eigen::Index>(k)) = std::sqrt(weights[static_cast<std::size_t>(j)]) * v[k](j);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, a.cols());
}

struct Attempt {
  FiniteRankModel model;
  double condition = kInf;
  bool ok = false;
};

Attempt recover_from(const DiscretizedOperator& op, const RealFunction& g, const FourierProfile& fhat,
                     const GammaProbe& probe, double max_condition) {
  Attempt at;
  const int r = static_cast<int>(probe.points.size());
  const Eigen::Index n = static_cast<Eigen::Index>(op.nodes.size());
  auto kernel = [&](double x, double y) {
    return g.difference_quotient(x, y) * fhat(y - x) / kSqrt2Pi;
  };
  Eigen::MatrixXcd gamma(n, r);
  for (int j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) gamma(i, j) = kernel(op.nodes[static_cast<std::size_t>(i)], probe.points[static_cast<std::size_t>(j)]);
  Eigen::MatrixXcd big(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) big(i, j) = kernel(probe.points[static_cast<std::size_t>(i)], probe.points[static_cast<std::size_t>(j)]);
  big = 0.5 * (big + big.adjoint()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(big);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  const double bottom = lam.cwiseAbs().minCoeff();
  at.condition = bottom > 0.0 ? top / bottom : kInf;
  if (!(at.condition < max_condition)) return at;

  at.model.nodes = op.nodes;
  at.model.weights = op.weights;
  at.model.momentum_space = false;
  for (int k = r - 1; k >= 0; --k) {
    const Eigen::VectorXcd psi = gamma * es.eigenvectors().col(k) / std::sqrt(std::abs(lam(k)));
    at.model.factors.push_back(psi);
    at.model.coefficients.push_back(lam(k) > 0 ? 1.0 : -1.0);
  }
  at.ok = true;
  return at;
}

}  // namespace

std::vector<double> principal_angles(const std::vector<double>& weights, const std::vector<Eigen::VectorXcd>& a,
                                     const std::vector<Eigen::VectorXcd>& b) {
  require(!a.empty() && !b.empty(), "principal_angles: empty factor set");
  const Eigen::MatrixXcd qa = orthonormal_basis(weights, a);
  const Eigen::MatrixXcd qb = orthonormal_basis(weights, b);
  // sin of the angles from the part of span(b) outside span(a).
  const Eigen::MatrixXcd resid = qb - qa * (qa.adjoint() * qb);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(resid);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    out.push_back(std::asin(std::min(1.0, svd.singularValues()(k))));
  std::sort(out.begin(), out.end());
  return out;
}

GammaRecovery gamma_recover(const DiscretizedOperator& op, const RealFunction& g, const FourierProfile& fhat,
                            const GammaProbe& first, const GammaProbe& second, const GammaOptions& opts) {
  if (op.route != OperatorRoute::NystromX)
    fail(ErrorKind::RouteMismatch, "gamma_recover: needs the position-space Nystrom operator");
  const SpectralReport sp = spectrum(op, {opts.rank_threshold, 1e-10, 1e-12});
  const int rank = sp.numerical_rank;
  for (const GammaProbe* p : {&first, &second}) {
    if (static_cast<int>(p->points.size()) != rank) {
      std::ostringstream os;
      os << "gamma_recover: probe set has " << p->points.size() << " points but the numerical rank is " << rank;
      fail(ErrorKind::ProbeSelection, os.str());
    }
  }
  for (double a : first.points)
    for (double b : second.points)
      require(a != b, "gamma_recover: probe sets must be disjoint");

  const Attempt a = recover_from(op, g, fhat, first, opts.max_condition);
  const Attempt b = recover_from(op, g, fhat, second, opts.max_condition);
  GammaRecovery out;
  out.condition[0] = a.condition;
  out.condition[1] = b.condition;
  if (!a.ok && !b.ok) {
    std::ostringstream os;
    os << "gamma_recover: probe matrices are singular on both sets (condition " << a.condition << ", "
       << b.condition << ")";
    fail(ErrorKind::ProbeSelection, os.str());
  }
  out.used_set = (a.ok && (!b.ok || a.condition <= b.condition)) ? 0 : 1;
  out.model = out.used_set == 0 ? a.model : b.model;
  if (a.ok && b.ok) {
    const std::vector<double> ang = principal_angles(op.weights, a.model.factors, b.model.factors);
    out.consistency_angle = ang.empty() ? 0.0 : ang.back();
  }

  const Eigen::MatrixXcd diff = out.model.assemble() - op.matrix;
  double err = 0.0;
  for (Eigen::Index j = 0; j < diff.cols(); ++j)
    for (Eigen::Index i = 0; i < diff.rows(); ++i)
      err = std::max(err, std::abs(diff(i, j)) / std::sqrt(op.weights[static_cast<std::size_t>(i)] *
                                                             op.weights[static_cast<std::size_t>(j)]));
  out.reassembly_error = err;
  return out;
}

std::pair<GammaProbe, GammaProbe> default_probes(int n) {
  require(n >= 1, "default_probes: need at least one probe");
  constexpr double kGolden = 0.6180339887498949;
  GammaProbe a, b;
  for (int j = 0; j < 2 * n; ++j) {
    const double u = std::fmod(0.5 + (j + 1) * kGolden, 1.0);
    (j < n ? a : b).points.push_back(-2.0 + 4.0 * u);
  }
  return {a, b};
}

DecayStrip estimate_strip(const RealFunction& fn, const Grid& grid) {
  const FourierProfile p = fourier_deriv(fn, grid);
  const double h0 = std::abs(p(0.0));
  require(h0 > 0.0, "estimate_strip: transform of f' vanishes at 0");
  const double kmax = kPi / grid.spacing();
  double khi = 0.25;
  while (khi < kmax && std::abs(p(khi)) > 1e-12 * h0) khi += 0.25;
  constexpr int kPoints = 60;
  std::vector<double> ks, ys;
  for (int i = 0; i < kPoints; ++i) {
    const double k = khi / 3.0 + (khi - khi / 3.0) * i / (kPoints - 1);
    const double v = std::abs(p(k));
    if (v <= 0.0) continue;
    ks.push_back(k);
    ys.push_back(std::log(v));
  }
  if (ks.size() < 8) fail(ErrorKind::FitQuality, "estimate_strip: transform too small to fit");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(ks.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ks.size()));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = std::log(ks[i]);
    a(static_cast<Eigen::Index>(i), 2) = -ks[i];
    y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  DecayStrip s;
  s.strip = c(2);
  s.power = c(1);
  s.residual = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(ks.size()));
  return s;
}

StripProduct strip_product_diagnostic(const RealFunction& f, const RealFunction& g, const Grid& grid) {
  StripProduct r;
  r.g_strip = estimate_strip(g, grid);
  r.f_strip = estimate_strip(f, grid);
  r.product = r.g_strip.strip * r.f_strip.strip;
  r.within_bound = r.product <= r.bound;
  r.f_moment_rate = estimate_decay_rate([&f](double t) { return f.derivative(t); }).rate;
  r.g_moment_rate = estimate_decay_rate([&g](double t) { return g.derivative(t); }).rate;
  return r;
}

}  // namespace hk
