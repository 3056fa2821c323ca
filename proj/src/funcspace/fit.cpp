#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/funcspace.hpp"

namespace hk {

NnlsResult nnls(const std::vector<double>& a, int rows, int cols, const std::vector<double>& b,
                double gradient_tol, int max_iterations) {
  require(rows > 0 && cols > 0, "nnls: empty system");
  require(a.size() == static_cast<std::size_t>(rows) * cols && b.size() == static_cast<std::size_t>(rows),
          "nnls: dimension mismatch");
  if (max_iterations <= 0) max_iterations = 3 * cols + 30;

  const Eigen::Map<const Eigen::MatrixXd> A(a.data(), rows, cols);
  const Eigen::Map<const Eigen::VectorXd> B(b.data(), rows);
  const double scale = std::max(1.0, (A.transpose() * B).norm());
  const double tol = gradient_tol * scale;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  std::vector<bool> passive(static_cast<std::size_t>(cols), false);

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<int> idx;
    for (int j = 0; j < cols; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd Ap(rows, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd sp = Ap.colPivHouseholderQr().solve(B);
    s.setZero(cols);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
  };

  NnlsResult r;
  Eigen::VectorXd w = A.transpose() * (B - A * x);
  while (r.iterations < max_iterations) {
    int pick = -1;
    double best = tol;
    for (int j = 0; j < cols; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        pick = j;
      }
    }
    if (pick < 0) break;
    passive[static_cast<std::size_t>(pick)] = true;
    ++r.iterations;

    Eigen::VectorXd s;
    for (int inner = 0; inner < 3 * cols; ++inner) {
      solve_passive(s);
      double step = 1.0;
      bool feasible = true;
      for (int j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          feasible = false;
          const double denom = x(j) - s(j);
          if (denom > 0.0) step = std::min(step, x(j) / denom);
        }
      }
      if (feasible) break;
      x += step * (s - x);
      for (int j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    for (int j = 0; j < cols; ++j) x(j) = passive[static_cast<std::size_t>(j)] ? std::max(s(j), 0.0) : 0.0;
    w = A.transpose() * (B - A * x);
  }

  const Eigen::VectorXd g = -w;
  double pg = 0.0;
  for (int j = 0; j < cols; ++j) {
    const double c = x(j) > 0.0 ? g(j) : std::min(g(j), 0.0);
    pg += c * c;
  }
  r.projected_gradient = std::sqrt(pg);
  r.converged = r.projected_gradient <= std::max(tol, 1e-8 * scale);
  r.residual_norm = (A * x - B).norm();
  r.x.assign(x.data(), x.data() + cols);
  return r;
}

MeasureFit fit_tanh_measure(const std::vector<double>& t, const std::vector<double>& f, double alpha,
                            const std::vector<double>& atom_grid, const FitOptions& opts) {
  require(t.size() == f.size() && t.size() >= 5, "fit_tanh_measure: need at least 5 samples");
  require(alpha > 0.0, "fit_tanh_measure: alpha must be positive");
  require(!atom_grid.empty(), "fit_tanh_measure: empty atom grid");
  for (std::size_t i = 1; i < atom_grid.size(); ++i)
    require(atom_grid[i] > atom_grid[i - 1], "fit_tanh_measure: atom grid must be increasing");

  const RealFunction samples = sampled_function(t, f);
  const auto& dv = std::get<Sampled>(samples.representation()).dv;

  double peak = 0.0;
  for (double d : dv) peak = std::max(peak, std::abs(d));
  require(peak > 0.0, "fit_tanh_measure: samples are constant");
  if (std::abs(dv.front()) > 1e-3 * peak || std::abs(dv.back()) > 1e-3 * peak) {
    fail(ErrorKind::Truncation, "fit_tanh_measure: samples do not reach the limits of f");
  }

  const double rate = kPi / (2.0 * alpha);
  const int rows = static_cast<int>(t.size());
  const int cols = static_cast<int>(atom_grid.size());
  std::vector<double> a(static_cast<std::size_t>(rows) * cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double c = std::cosh(rate * (t[static_cast<std::size_t>(i)] - atom_grid[static_cast<std::size_t>(j)]));
      a[static_cast<std::size_t>(j) * rows + i] = std::isfinite(c) ? rate / (c * c) : 0.0;
    }
  }
  const NnlsResult sol = nnls(a, rows, cols, dv);

  double bnorm = 0.0;
  for (double d : dv) bnorm += d * d;
  bnorm = std::sqrt(bnorm);

  std::vector<Atom> atoms;
  double wmax = 0.0;
  for (double x : sol.x) wmax = std::max(wmax, x);
  for (int j = 0; j < cols; ++j) {
    if (sol.x[static_cast<std::size_t>(j)] > 0.0) atoms.push_back({atom_grid[static_cast<std::size_t>(j)], sol.x[static_cast<std::size_t>(j)]});
  }

  std::vector<Atom> clusters;
  const double cutoff = 1e-12 * wmax;
  for (int j = 0; j < cols;) {
    if (sol.x[static_cast<std::size_t>(j)] <= cutoff) {
      ++j;
      continue;
    }
    double mass = 0.0, moment = 0.0;
    while (j < cols && sol.x[static_cast<std::size_t>(j)] > cutoff) {
      mass += sol.x[static_cast<std::size_t>(j)];
      moment += sol.x[static_cast<std::size_t>(j)] * atom_grid[static_cast<std::size_t>(j)];
      ++j;
    }
    clusters.push_back({moment / mass, mass});
  }
  double total = 0.0;
  for (const Atom& c : clusters) total += c.weight;
  std::erase_if(clusters, [&](const Atom& c) { return c.weight <= opts.atom_floor * total; });

  double min_gap = kInf;
  for (std::size_t i = 1; i < atom_grid.size(); ++i) min_gap = std::min(min_gap, atom_grid[i] - atom_grid[i - 1]);

  MeasureFit fit{TanhMeasure(std::move(atoms), 0.5 * (f.front() + f.back()), alpha), 0.0, {}, false, false};
  fit.residual = sol.residual_norm / bnorm;
  fit.effective_atoms = std::move(clusters);
  fit.member = fit.residual < opts.membership_threshold;
  fit.conditioning_warning = min_gap < 0.1 / rate;
  return fit;
}

}  // namespace hk
