#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hk/monotone.hpp"

namespace hk {

std::pair<double, double> loewner_test_interval(const MonotoneFunction& fn) {
  const bool flo = std::isfinite(fn.lo), fhi = std::isfinite(fn.hi);
  if (flo && fhi) {
    const double w = fn.hi - fn.lo;
    return {fn.lo + 0.05 * w, fn.hi - 0.05 * w};
  }
  if (flo) return {fn.lo + 0.01, fn.lo + 4.0};
  if (fhi) return {fn.hi - 4.0, fn.hi - 0.01};
  return {-3.0, 3.0};
}

namespace {

Eigen::MatrixXd apply(const MonotoneFunction& fn, const Eigen::MatrixXd& a, double* peak) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd fv = es.eigenvalues();
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv(i) = fn.value(fv(i));
    *peak = std::max(*peak, std::abs(fv(i)));
  }
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

}  // namespace

LoewnerReport loewner_matrix_test(const MonotoneFunction& fn, const LoewnerOptions& opts) {
  require(opts.n >= 2, "loewner_matrix_test: n must be at least 2");
  require(opts.trials >= 1, "loewner_matrix_test: need at least one trial");
  const auto [a, b] = loewner_test_interval(fn);
  LoewnerReport rep;
  rep.name = fn.name;
  rep.n = opts.n;
  rep.test_lo = a;
  rep.test_hi = b;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> rank_pick(1, opts.n);
  const int n = opts.n;

  for (int trial = 0; trial < opts.trials; ++trial) {
    Eigen::MatrixXd bm, am;
    int tries = 0;
    for (;;) {
      const Eigen::MatrixXd q = random_orthogonal(n, rng);
      Eigen::VectorXd s(n);
      for (int i = 0; i < n; ++i) s(i) = a + (b - a) * unit(rng);
      bm = q * s.asDiagonal() * q.transpose();
      bm = 0.5 * (bm + bm.transpose()).eval();
      const int r = rank_pick(rng);
      Eigen::MatrixXd rm(n, r);
      for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) rm(i, j) = normal(rng);
      const Eigen::MatrixXd cm = rm * rm.transpose();
      const double cmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cm, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      const double t = (1.0 - unit(rng)) * (b - s.maxCoeff()) / cmax;
      am = bm + t * cm;
      const Eigen::VectorXd ea = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(am, Eigen::EigenvaluesOnly).eigenvalues();
      const Eigen::VectorXd eb = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(bm, Eigen::EigenvaluesOnly).eigenvalues();
      if (ea.minCoeff() >= a && ea.maxCoeff() <= b && eb.minCoeff() >= a && eb.maxCoeff() <= b) break;
      ++rep.resamples;
      if (++tries >= opts.max_retries) {
        std::ostringstream os;
        os << "loewner_matrix_test: spectrum escaped [" << a << ", " << b << "] after " << tries << " resamples";
        fail(ErrorKind::Accuracy, os.str());
      }
    }
    double peak = 0.0;
    const Eigen::MatrixXd diff = apply(fn, am, &peak) - apply(fn, bm, &peak);
    const Eigen::MatrixXd sym = 0.5 * (diff + diff.transpose());
    const double m = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    const double scale = std::max(1.0, peak);
    rep.scale = std::max(rep.scale, scale);
    rep.min_eig = std::min(rep.min_eig, m);
    ++rep.trials;
    if (m < -opts.tolerance * scale) {
      ++rep.violations;
      if (rep.first_violation < 0) rep.first_violation = trial;
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

std::pair<double, double> function_range(const RealFunction& fn) {
  if (fn.claims_increasing()) return {fn.limit_at_minus_infinity(), fn.limit_at_plus_infinity()};
  const double s = fn.sup_bound();
  return {-s, s};
}

FunctionPair compose_pair(const MonotoneFunction& F, const RealFunction& f, const MonotoneFunction& G,
                          const RealFunction& g) {
  auto compose = [](const MonotoneFunction& outer, const RealFunction& inner) {
    const auto [lo, hi] = function_range(inner);
    auto complain = [&](const char* which, double end, double bound) {
      std::ostringstream os;
      os << "compose_pair: range endpoint " << which << " = " << end << " of " << inner.describe()
         << " is not inside the domain of " << outer.name << " (bound " << bound << ")";
      fail(ErrorKind::Containment, os.str());
    };
    if (!(lo > outer.lo)) complain("inf", lo, outer.lo);
    if (!(hi < outer.hi)) complain("sup", hi, outer.hi);
    if (outer.name == "identity") return inner;
    return composed_function(outer.name, outer.value, outer.derivative, inner);
  };
  return {compose(F, f), compose(G, g)};
}

SpectralReport composition_positivity_experiment(const MonotoneFunction& F, const RealFunction& f,
                                                 const MonotoneFunction& G, const RealFunction& g,
                                                 const Grid& grid, const SpectrumOptions& opts) {
  const FunctionPair p = compose_pair(F, f, G, g);
  return spectrum(build_nystrom_x(p.f, p.g, grid), opts);
}

}  // namespace hk
