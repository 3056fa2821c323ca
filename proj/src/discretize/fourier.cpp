#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/discretize.hpp"

namespace hk {

std::string_view to_string(TransformRoute route) {
  switch (route) {
    case TransformRoute::ClosedForm: return "closed-form";
    case TransformRoute::FFT: return "fft";
    case TransformRoute::Auto: return "auto";
  }
  return "?";
}

namespace {

// Decay exponent s of h(t) ~ C e^{-s|t|}, fitted on the outer half of the samples.
double tail_exponent(const Grid& grid, const std::vector<double>& h) {
  const double L = grid.half_width();
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = std::abs(grid.node(j));
    const double v = h[static_cast<std::size_t>(j)];
    if (x < 0.5 * L || v < 1e-300) continue;
    const double y = std::log(v);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (n < 8) return kInf;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::max(0.0, -slope);
}

}  // namespace

FourierProfile FourierProfile::closed_form(const RealFunction& fn) {
  if (!fn.has_closed_form_transform())
    fail(ErrorKind::UnsupportedVariant, fn.describe() + ": no closed-form transform of f'");
  FourierProfile p;
  p.route_ = TransformRoute::ClosedForm;
  p.label_ = fn.describe();
  p.fn_ = std::make_shared<RealFunction>(fn);
  p.strip_ = fn.moment_strip();
  return p;
}

FourierProfile FourierProfile::from_derivative_samples(const Grid& grid, std::vector<double> deriv,
                                                       std::string label) {
  require(static_cast<int>(deriv.size()) == grid.size(), "FourierProfile: sample count mismatch");
  FourierProfile p;
  p.route_ = TransformRoute::FFT;
  p.label_ = std::move(label);
  p.grid_ = std::make_shared<Grid>(grid);
  p.strip_ = tail_exponent(grid, deriv);
  p.deriv_ = std::move(deriv);
  return p;
}

bool FourierProfile::diverges_at(cplx k) const {
  if (k.imag() == 0.0) return false;
  return !(std::abs(k.imag()) < strip_);
}

double FourierProfile::moment_strip() const { return strip_; }

cplx FourierProfile::operator()(cplx k) const {
  if (diverges_at(k)) {
    std::ostringstream os;
    os << label_ << ": transform of f' diverges at Im k = " << k.imag() << " (moment strip " << strip_ << ")";
    fail(ErrorKind::Divergence, os.str());
  }
  if (route_ == TransformRoute::ClosedForm) return *fn_->derivative_transform(k);
  const Grid& g = *grid_;
  const double dx = g.spacing();
  // e^{-ik x_j} by recurrence from x_0 = -L.
  const cplx step = std::exp(cplx(0, -1) * k * dx);
  cplx phase = std::exp(cplx(0, -1) * k * g.node(0));
  cplx s = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    s += deriv_[static_cast<std::size_t>(j)] * phase;
    phase *= step;
    if ((j & 255) == 255) phase = std::exp(cplx(0, -1) * k * g.node(j + 1));
  }
  return s * dx / kSqrt2Pi;
}

double FourierProfile::bracket() const { return kSqrt2Pi * (*this)(0.0).real(); }

std::vector<cplx> FourierProfile::lattice_values() const {
  if (route_ != TransformRoute::FFT) fail(ErrorKind::RouteMismatch, "lattice_values: FFT route only");
  std::vector<cplx> v(deriv_.begin(), deriv_.end());
  return continuous_transform(*grid_, v);
}

FourierProfile fourier_deriv(const RealFunction& fn, const Grid& grid, const FourierOptions& opts) {
  TransformRoute route = opts.route;
  if (route == TransformRoute::Auto)
    route = fn.has_closed_form_transform() ? TransformRoute::ClosedForm : TransformRoute::FFT;
  if (route == TransformRoute::ClosedForm) return FourierProfile::closed_form(fn);

  if (!is_power_of_two(grid.size())) fail(ErrorKind::Config, "fourier_deriv: FFT route needs N a power of two");
  const double L = grid.half_width();
  const double tail = std::max(std::abs(fn.derivative(-L)), std::abs(fn.derivative(L)));
  if (!(tail < opts.tail_tolerance)) {
    std::ostringstream os;
    os << fn.describe() << ": |f'| = " << tail << " at the grid ends exceeds " << opts.tail_tolerance;
    throw AccuracyError(ErrorKind::Truncation, os.str(), tail);
  }
  std::vector<double> d(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) d[static_cast<std::size_t>(j)] = fn.derivative(grid.node(j));
  return FourierProfile::from_derivative_samples(grid, std::move(d), fn.describe());
}

}  // namespace hk
