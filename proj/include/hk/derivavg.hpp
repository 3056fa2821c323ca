#pragma once

// Averaged symmetric difference quotients with the weight h(w) = w log((1+w)/(1-w)).

#include <vector>

#include "hk/funcspace.hpp"

namespace hk {

/// h(w) on (0, 1).
double averaging_weight(double w);
/// 2 sum_{m=1}^{terms} w^{2m} / (2m - 1).
double averaging_weight_series(double w, int terms);
/// Integral of h over (0, 1) under the module's quadrature.
double averaging_weight_integral();

struct AverageOptions {
  double tolerance = 1e-10;  // relative error estimate accepted from the quadrature
};

/// I_r(x) = int_0^1 h(w) (g(x + rw) - g(x - rw)) / (2rw) dw.
double averaged_quotient(const RealFunction& g, double x, double r, const AverageOptions& opts = {});

struct ConvergenceReport {
  std::vector<double> radii;
  std::vector<double> errors;  // max over the lattice of |I_r(x) - g'(x)|
  double slope = 0.0;          // least-squares slope of log error against log r
  double constant = 0.0;       // max error / r^2
  bool rounding_level = false; // all errors at rounding level; slope not meaningful
};

ConvergenceReport convergence_study(const RealFunction& g, const std::vector<double>& xs,
                                    const std::vector<double>& radii, const AverageOptions& opts = {});

}  // namespace hk
