#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

#include "hk/discretize.hpp"

namespace hk {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(double half_width, int points, bool transform_route)
    : half_width_(half_width), points_(points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) fail(ErrorKind::Config, "grid: L must be positive");
  if (points < 2) fail(ErrorKind::Config, "grid: N must be at least 2");
  if (transform_route && !is_power_of_two(points)) {
    std::ostringstream os;
    os << "grid: N = " << points << " is not a power of two";
    fail(ErrorKind::Config, os.str());
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(points_));
  for (int j = 0; j < points_; ++j) x[static_cast<std::size_t>(j)] = node(j);
  return x;
}

std::vector<double> Grid::momenta() const {
  std::vector<double> k(static_cast<std::size_t>(points_));
  for (int m = 0; m < points_; ++m) k[static_cast<std::size_t>(m)] = momentum(m);
  return k;
}

std::vector<double> quadrature_weights(const Grid& grid) {
  return std::vector<double>(static_cast<std::size_t>(grid.size()), grid.spacing());
}

std::vector<cplx> fft_forward(const std::vector<cplx>& v) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, v);
  return out;
}

std::vector<cplx> fft_inverse(const std::vector<cplx>& v) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.inv(out, v);
  return out;
}

// e^{-i k_m x_j} = (-1)^{m'} e^{-2 pi i m' j / N} with m' = m - N/2.
std::vector<cplx> unitary_dft(const Grid& grid, const std::vector<cplx>& v) {
  const int n = grid.size();
  require(static_cast<int>(v.size()) == n, "unitary_dft: size mismatch");
  const std::vector<cplx> raw = fft_forward(v);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> c(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const int mm = m - n / 2;
    const double sign = (mm % 2 == 0) ? 1.0 : -1.0;
    c[static_cast<std::size_t>(m)] = sign * norm * raw[static_cast<std::size_t>((mm + n) % n)];
  }
  return c;
}

std::vector<cplx> inverse_unitary_dft(const Grid& grid, const std::vector<cplx>& c) {
  const int n = grid.size();
  require(static_cast<int>(c.size()) == n, "inverse_unitary_dft: size mismatch");
  std::vector<cplx> raw(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const int mm = m - n / 2;
    const double sign = (mm % 2 == 0) ? 1.0 : -1.0;
    raw[static_cast<std::size_t>((mm + n) % n)] = sign * c[static_cast<std::size_t>(m)];
  }
  std::vector<cplx> v = fft_inverse(raw);
  const double scale = std::sqrt(static_cast<double>(n));
  for (cplx& x : v) x *= scale;
  return v;
}

std::vector<cplx> continuous_transform(const Grid& grid, const std::vector<cplx>& samples) {
  std::vector<cplx> c = unitary_dft(grid, samples);
  const double scale = grid.spacing() * std::sqrt(static_cast<double>(grid.size())) / kSqrt2Pi;
  for (cplx& x : c) x *= scale;
  return c;
}

void check_periodic(const RealFunction& fn, const Grid& grid, double tol) {
  const double L = grid.half_width();
  const double dl = fn.derivative(-L), dr = fn.derivative(L);
  if (std::abs(dl) < tol && std::abs(dr) < tol) return;
  const double vl = fn.value(-L), vr = fn.value(L);
  if (std::abs(vl - vr) < tol && std::abs(dl - dr) < tol) return;
  std::ostringstream os;
  os << fn.describe() << " is neither flat nor periodic on [-" << L << ", " << L << "] (f'(-L) = " << dl
     << ", f'(L) = " << dr << ", f(L) - f(-L) = " << vr - vl << ")";
  fail(ErrorKind::Periodization, os.str());
}

}  // namespace hk
