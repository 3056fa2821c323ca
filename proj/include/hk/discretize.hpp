#pragma once

// Uniform periodic grids, trapezoid weights, the unitary transform
// convention h^(k) = (2 pi)^{-1/2} int h(t) e^{-ikt} dt, and transforms of f'.

#include <memory>
#include <string>
#include <vector>

#include "hk/funcspace.hpp"

namespace hk {

bool is_power_of_two(int n);

/// Nodes x_j = -L + j*dx (j < N), momenta k_m = (pi/L) m for m = -N/2 .. N/2-1.
class Grid {
 public:
  Grid(double half_width, int points, bool transform_route = true);

  double half_width() const { return half_width_; }
  int size() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / points_; }
  double momentum_spacing() const { return kPi / half_width_; }

  double node(int j) const { return -half_width_ + j * spacing(); }
  /// Momentum of position m in the ordered list (m = 0 is -N/2).
  double momentum(int m) const { return momentum_spacing() * (m - points_ / 2); }
  std::vector<double> nodes() const;
  std::vector<double> momenta() const;

 private:
  double half_width_;
  int points_;
};

/// Uniform periodic trapezoid weights; sum equals 2L.
std::vector<double> quadrature_weights(const Grid& grid);

/// c_m = N^{-1/2} sum_j v_j e^{-i k_m x_j}, ordered like Grid::momenta.
std::vector<cplx> unitary_dft(const Grid& grid, const std::vector<cplx>& v);
std::vector<cplx> inverse_unitary_dft(const Grid& grid, const std::vector<cplx>& c);

/// Trapezoid approximation of the continuous transform at the lattice momenta.
std::vector<cplx> continuous_transform(const Grid& grid, const std::vector<cplx>& samples);

/// Plain cyclic DFT helpers (unnormalized forward, 1/N inverse).
std::vector<cplx> fft_forward(const std::vector<cplx>& v);
std::vector<cplx> fft_inverse(const std::vector<cplx>& v);

enum class TransformRoute { ClosedForm, FFT, Auto };

std::string_view to_string(TransformRoute route);

/// Transform of f' in the unitary convention.
class FourierProfile {
 public:
  /// Closed-form route; fn must have a closed-form derivative transform.
  static FourierProfile closed_form(const RealFunction& fn);
  /// Numerical route from derivative samples on `grid`.
  static FourierProfile from_derivative_samples(const Grid& grid, std::vector<double> deriv,
                                                std::string label);

  TransformRoute route() const { return route_; }
  const std::string& label() const { return label_; }

  /// Throws Divergence when Im k leaves the moment-finite region.
  cplx operator()(cplx k) const;
  cplx operator()(double k) const { return (*this)(cplx(k, 0.0)); }
  bool diverges_at(cplx k) const;
  /// Sup of |Im k| with finite transform (FFT route: estimated from the sample tails).
  double moment_strip() const;
  /// [f] recovered as sqrt(2 pi) h^(0).
  double bracket() const;

  /// Values at the grid's own momenta by FFT (FFT route only).
  std::vector<cplx> lattice_values() const;

 private:
  FourierProfile() = default;

  TransformRoute route_ = TransformRoute::ClosedForm;
  std::string label_;
  std::shared_ptr<const RealFunction> fn_;
  std::shared_ptr<const Grid> grid_;
  std::vector<double> deriv_;
  double strip_ = 0.0;
};

struct FourierOptions {
  TransformRoute route = TransformRoute::Auto;
  double tail_tolerance = 1e-12;
};

FourierProfile fourier_deriv(const RealFunction& fn, const Grid& grid, const FourierOptions& opts = {});

/// Direct-route compatibility: flat ends (|f'| < tol at +-L) or matching end values and slopes.
void check_periodic(const RealFunction& fn, const Grid& grid, double tol = 1e-10);

}  // namespace hk
