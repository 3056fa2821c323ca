#pragma once

// Finite-rank commutators: Kato's rank-one family, the indefinite rank-three
// example, factor recovery from kernel values, and derivative reconstruction.

#include <Eigen/Dense>

#include <vector>

#include "hk/commutator.hpp"

namespace hk {

/// K = sum_k c_k phi_k phi_k^* with phi_k sampled on `nodes`.
struct FiniteRankModel {
  std::vector<double> nodes;
  std::vector<double> weights;
  bool momentum_space = false;
  std::vector<Eigen::VectorXcd> factors;
  std::vector<double> coefficients;

  int rank() const { return static_cast<int>(factors.size()); }
  /// W^{1/2} (sum_k c_k phi_k phi_k^*) W^{1/2}, comparable with DiscretizedOperator::matrix.
  Eigen::MatrixXcd assemble() const;
  /// Determinant of the normalized Gram matrix of the factors.
  double gram_determinant() const;
};

/// Eigenpairs above the rank threshold, phi_k = |lambda_k|^{1/2} v_k / sqrt(w), c_k = sign(lambda_k).
FiniteRankModel model_from_operator(const DiscretizedOperator& op, double rank_threshold = 1e-6);

/// Weighted l2 inner product (a, b) = sum_j w_j conj(a_j) b_j.
cplx inner_product(const std::vector<double>& weights, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
/// (phi, K phi) for samples phi on the operator's nodes.
double quadratic_form(const DiscretizedOperator& op, const Eigen::VectorXcd& phi);

/// f = c1 tanh(alpha_hat (t - t1)) + d1, g = c2 tanh(alpha (t - t2)) + d2, alpha alpha_hat = pi/2.
FunctionPair kato_rank_one_pair(double alpha, double c1, double c2, double t1 = 0.0, double t2 = 0.0,
                                double d1 = 0.0, double d2 = 0.0);

struct Rank3Example {
  FunctionPair pair;
  FiniteRankModel model;  // factors phi, phi_plus, phi_minus
  double beta = 1.0;
};

/// g = tanh x, f = tanh(pi xi / 2) + beta tanh(pi xi).
Rank3Example rank3_example(double beta, const Grid& grid);

/// (2 pi/[f]) sum_k c_k |phi_k(x)|^2; requires nonnegative coefficients.
std::vector<double> reconstruct_gprime(const FiniteRankModel& model, VariationBracket f_bracket);
/// (2 pi/[g]) sum_k c_k |phi_k^(xi)|^2 on the grid momenta; position-space factors are transformed first.
std::vector<double> reconstruct_fprime(const FiniteRankModel& model, const Grid& grid, VariationBracket g_bracket);

struct GammaProbe {
  std::vector<double> points;
};

struct GammaOptions {
  double rank_threshold = 1e-6;
  double max_condition = 1e12;
};

struct GammaRecovery {
  FiniteRankModel model;
  int used_set = 0;              // 0 for the first probe set, 1 for the second
  double condition[2] = {kInf, kInf};
  double reassembly_error = 0.0;  // max |K_model(x, y) - K(x, y)| over grid nodes
  double consistency_angle = -1.0;  // largest principal angle between the two recoveries, -1 if one set failed
};

/// gamma_j(x) = K(x, y_j) from the kernel formula; the factors follow from the probe matrix.
GammaRecovery gamma_recover(const DiscretizedOperator& op, const RealFunction& g, const FourierProfile& fhat,
                            const GammaProbe& first, const GammaProbe& second, const GammaOptions& opts = {});

/// Two disjoint quasi-random probe sets of size n in [-2, 2].
std::pair<GammaProbe, GammaProbe> default_probes(int n);

/// Principal angles (radians, ascending) between the weighted spans of two factor sets.
std::vector<double> principal_angles(const std::vector<double>& weights, const std::vector<Eigen::VectorXcd>& a,
                                     const std::vector<Eigen::VectorXcd>& b);

struct DecayStrip {
  double strip = 0.0;     // fitted a in |h^(k)| ~ C k^p e^{-a k}
  double power = 0.0;
  double residual = 0.0;  // rms log residual of the fit
};

/// Analytic strip of fn estimated from the exponential decay of the transform of fn'.
DecayStrip estimate_strip(const RealFunction& fn, const Grid& grid);

struct StripProduct {
  DecayStrip g_strip, f_strip;
  double product = 0.0;
  double bound = kPi / 2.0;
  bool within_bound = false;
  double f_moment_rate = 0.0, g_moment_rate = 0.0;  // beta in f'(t) ~ e^{-2 beta |t|}
};

StripProduct strip_product_diagnostic(const RealFunction& f, const RealFunction& g, const Grid& grid);

}  // namespace hk
