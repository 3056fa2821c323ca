#pragma once

// The commutator K = i[f(P), g(Q)] by Nystrom discretization of its kernel in
// either picture, or by direct functional calculus on a periodic grid.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "hk/discretize.hpp"

namespace hk {

struct FunctionPair {
  RealFunction f;
  RealFunction g;
};

enum class OperatorRoute { NystromX, NystromP, Direct };

std::string_view to_string(OperatorRoute route);

struct DiscretizedOperator {
  Grid grid;
  OperatorRoute route = OperatorRoute::NystromX;
  Eigen::MatrixXcd matrix;       // W^{1/2} K W^{1/2}
  std::vector<double> nodes;     // positions (NystromX, Direct) or momenta (NystromP)
  std::vector<double> weights;
  std::string f_name, g_name;
  double f_bracket = 0.0, g_bracket = 0.0;
  double structural_trace = 0.0;  // Direct: trace in the momentum basis, exactly zero

  /// Continuum kernel value recovered from the matrix.
  cplx kernel_value(int i, int j) const;
};

struct BuildOptions {
  FourierOptions transform;
  int oversample = 2;  // Direct route: band compression factor for g(Q)
};

DiscretizedOperator build_nystrom_x(const RealFunction& f, const RealFunction& g, const Grid& grid,
                                    const BuildOptions& opts = {});
DiscretizedOperator build_nystrom_p(const RealFunction& f, const RealFunction& g, const Grid& grid,
                                    const BuildOptions& opts = {});
DiscretizedOperator build_direct(const RealFunction& f, const RealFunction& g, const Grid& grid,
                                 const BuildOptions& opts = {});

struct SpectralReport {
  std::vector<double> eigenvalues;  // descending
  double min_eig = 0.0;
  double max_eig = 0.0;
  double max_abs_eig = 0.0;
  double trace = 0.0;
  int numerical_rank = 0;
  double rank_threshold = 1e-6;
  double positivity_tolerance = 1e-10;
  double hermiticity_error = 0.0;
  bool positive = false;
};

struct SpectrumOptions {
  double rank_threshold = 1e-6;
  double positivity_tolerance = 1e-10;
  double hermiticity_tolerance = 1e-12;
};

SpectralReport spectrum(const DiscretizedOperator& op, const SpectrumOptions& opts = {});

struct Eigensystem {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXcd vectors;  // columns, unit l2 norm on the weighted grid
};

Eigensystem eigensystem(const DiscretizedOperator& op);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double error = 0.0;  // relative when |rhs| > 0
};

/// tr K against [f][g] / (2 pi).
IdentityCheck trace_identity_check(const DiscretizedOperator& op);

/// (sqrt(2 pi)/[g]) tr(e^{iPx} K e^{-iPy}) from the momentum diagonal.
cplx shifted_trace(const DiscretizedOperator& op, cplx x, cplx y);

struct StripReport {
  double y = 0.0;
  std::vector<double> xs;
  std::vector<double> lhs, rhs, im_g;
  double max_residual = 0.0;
  double min_im_g = 0.0;
  double min_lhs = 0.0;
  bool pole_proximity = false;
};

struct StripOptions {
  double x_extent = 5.0;
  int x_points = 41;
  double pole_margin = 0.9;
};

/// K(x - iy, x + iy) against (2 pi)^{-1/2} (Im g(x + iy) / y) f'^(2iy) on an x-lattice.
StripReport strip_positivity_check(const RealFunction& f, const RealFunction& g, double y,
                                   const Grid& grid, const StripOptions& opts = {});

}  // namespace hk
