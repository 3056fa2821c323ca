#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/finiterank.hpp"

namespace hk {

Eigen::MatrixXcd FiniteRankModel::assemble() const {
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXd sw(n);
  for (Eigen::Index j = 0; j < n; ++j) sw(j) = std::sqrt(weights[static_cast<std::size_t>(j)]);
  for (int k = 0; k < rank(); ++k) {
    const Eigen::VectorXcd v = sw.cwiseProduct(factors[static_cast<std::size_t>(k)]);
    m += coefficients[static_cast<std::size_t>(k)] * v * v.adjoint();
  }
  return m;
}

double FiniteRankModel::gram_determinant() const {
  const int r = rank();
  if (r == 0) return 1.0;
  Eigen::MatrixXcd gram(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      gram(a, b) = inner_product(weights, factors[static_cast<std::size_t>(a)], factors[static_cast<std::size_t>(b)]);
  Eigen::VectorXd d = gram.diagonal().real().cwiseSqrt();
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) gram(a, b) /= d(a) * d(b);
  return std::abs(gram.determinant());
}

cplx inner_product(const std::vector<double>& weights, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  require(a.size() == b.size() && static_cast<std::size_t>(a.size()) == weights.size(),
          "inner_product: size mismatch");
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) s += weights[static_cast<std::size_t>(j)] * std::conj(a(j)) * b(j);
  return s;
}

double quadratic_form(const DiscretizedOperator& op, const Eigen::VectorXcd& phi) {
  require(static_cast<std::size_t>(phi.size()) == op.weights.size(), "quadratic_form: size mismatch");
  Eigen::VectorXcd v(phi.size());
  for (Eigen::Index j = 0; j < phi.size(); ++j) v(j) = std::sqrt(op.weights[static_cast<std::size_t>(j)]) * phi(j);
  return v.dot(op.matrix * v).real();
}

FiniteRankModel model_from_operator(const DiscretizedOperator& op, double rank_threshold) {
  const Eigensystem es = eigensystem(op);
  double top = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) top = std::max(top, std::abs(es.values(k)));
  FiniteRankModel m;
  m.nodes = op.nodes;
  m.weights = op.weights;
  m.momentum_space = op.route == OperatorRoute::NystromP;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const double l = es.values(k);
    if (!(std::abs(l) > rank_threshold * top)) continue;
    Eigen::VectorXcd phi = es.vectors.col(k) * std::sqrt(std::abs(l));
    for (Eigen::Index j = 0; j < phi.size(); ++j) phi(j) /= std::sqrt(op.weights[static_cast<std::size_t>(j)]);
    m.factors.push_back(std::move(phi));
    m.coefficients.push_back(l > 0 ? 1.0 : -1.0);
  }
  return m;
}

FunctionPair kato_rank_one_pair(double alpha, double c1, double c2, double t1, double t2, double d1, double d2) {
  require(alpha > 0.0 && std::isfinite(alpha), "kato_rank_one_pair: alpha must be positive");
  if (!(c1 * c2 > 0.0)) {
    std::ostringstream os;
    os << "kato_rank_one_pair: need c1*c2 > 0, got c1 = " << c1 << ", c2 = " << c2;
    fail(ErrorKind::SignConstraint, os.str());
  }
  const double alpha_hat = kPi / (2.0 * alpha);
  return {tanh_affine(c1, alpha_hat, t1, d1), tanh_affine(c2, alpha, t2, d2)};
}

Rank3Example rank3_example(double beta, const Grid& grid) {
  require(beta > 0.0 && std::isfinite(beta), "rank3_example: beta must be positive");
  Rank3Example ex{{sum_of({tanh_affine(1.0, kPi / 2.0), tanh_affine(beta, kPi)}, "rank3-f(beta=" + std::to_string(beta) + ")"),
                   tanh_affine(1.0, 1.0)},
                  {},
                  beta};
  FiniteRankModel& m = ex.model;
  m.nodes = grid.nodes();
  m.weights = quadrature_weights(grid);
  const Eigen::Index n = grid.size();
  Eigen::VectorXcd phi(n), plus(n), minus(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = m.nodes[static_cast<std::size_t>(j)];
    const double sech = 1.0 / std::cosh(x);
    phi(j) = sech;
    plus(j) = std::cosh(0.5 * x) * sech;
    minus(j) = std::sinh(0.5 * x) * sech;
  }
  m.factors = {phi, plus, minus};
  m.coefficients = {1.0 / kPi, beta / kPi, -beta / kPi};
  return ex;
}

namespace {

std::vector<double> weighted_square_sum(const FiniteRankModel& model, const std::vector<Eigen::VectorXcd>& factors,
                                        std::size_t n, double scale) {
  for (double c : model.coefficients)
    if (c < 0.0)
      fail(ErrorKind::NotApplicable, "reconstruction needs a positive finite-rank model (mixed-sign coefficients)");
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < factors.size(); ++k)
    for (std::size_t j = 0; j < n; ++j)
      out[j] += scale * model.coefficients[k] * std::norm(factors[k](static_cast<Eigen::Index>(j)));
  return out;
}

}  // namespace

std::vector<double> reconstruct_gprime(const FiniteRankModel& model, VariationBracket f_bracket) {
  require(!model.momentum_space, "reconstruct_gprime: needs a position-space model");
  require(f_bracket.value > 0.0, "reconstruct_gprime: [f] must be positive");
  return weighted_square_sum(model, model.factors, model.nodes.size(), 2.0 * kPi / f_bracket.value);
}

std::vector<double> reconstruct_fprime(const FiniteRankModel& model, const Grid& grid, VariationBracket g_bracket) {
  require(g_bracket.value > 0.0, "reconstruct_fprime: [g] must be positive");
  require(model.nodes.size() == static_cast<std::size_t>(grid.size()), "reconstruct_fprime: grid mismatch");
  std::vector<Eigen::VectorXcd> hat;
  for (const Eigen::VectorXcd& phi : model.factors) {
    if (model.momentum_space) {
      hat.push_back(phi);
      continue;
    }
    const std::vector<cplx> v(phi.data(), phi.data() + phi.size());
    const std::vector<cplx> t = continuous_transform(grid, v);
    hat.emplace_back(Eigen::Map<const Eigen::VectorXcd>(t.data(), static_cast<Eigen::Index>(t.size())));
  }
  return weighted_square_sum(model, hat, static_cast<std::size_t>(grid.size()), 2.0 * kPi / g_bracket.value);
}

}  // namespace hk
