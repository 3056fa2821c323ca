#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/derivavg.hpp"

namespace hk {

double averaging_weight(double w) {
  require(w > 0.0 && w < 1.0, "averaging_weight: w must lie in (0, 1)");
  return 2.0 * w * std::atanh(w);
}

double averaging_weight_series(double w, int terms) {
  double s = 0.0, p = w * w;
  for (int m = 1; m <= terms; ++m) {
    s += p / (2.0 * m - 1.0);
    p *= w * w;
  }
  return 2.0 * s;
}

namespace {

template <class F>
double integrate_unit(F&& fn, double tolerance, const char* what) {
  // The weight has a logarithmic singularity at w = 1; tanh-sinh nodes never touch it.
  boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0, l1 = 0.0;
  const double v = rule.integrate(fn, 0.0, 1.0, 1e-14, &err, &l1);
  const double rel = err / std::max(l1, 1e-300);
  if (!(rel < tolerance) && !(err < tolerance * 1e-3)) {
    std::ostringstream os;
    os << what << ": quadrature error estimate " << rel << " above " << tolerance;
    throw AccuracyError(ErrorKind::Accuracy, os.str(), rel);
  }
  return v;
}

}  // namespace

double averaging_weight_integral() {
  return integrate_unit([](double w) { return 2.0 * w * std::atanh(w); }, 1e-12, "averaging_weight_integral");
}

double averaged_quotient(const RealFunction& g, double x, double r, const AverageOptions& opts) {
  require(r > 0.0 && std::isfinite(r), "averaged_quotient: r must be positive");
  auto integrand = [&](double w) {
    if (w <= 0.0) return 0.0;
    return 2.0 * w * std::atanh(w) * g.difference_quotient(x + r * w, x - r * w);
  };
  return integrate_unit(integrand, opts.tolerance, "averaged_quotient");
}

ConvergenceReport convergence_study(const RealFunction& g, const std::vector<double>& xs,
                                    const std::vector<double>& radii, const AverageOptions& opts) {
  require(!xs.empty() && radii.size() >= 2, "convergence_study: need lattice points and at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    require(radii[i] < radii[i - 1], "convergence_study: radii must be decreasing");
  ConvergenceReport rep;
  rep.radii = radii;
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(g.derivative(x)));
  for (double r : radii) {
    double e = 0.0;
    for (double x : xs) e = std::max(e, std::abs(averaged_quotient(g, x, r, opts) - g.derivative(x)));
    rep.errors.push_back(e);
    rep.constant = std::max(rep.constant, e / (r * r));
  }
  rep.rounding_level = std::all_of(rep.errors.begin(), rep.errors.end(),
                                   [&](double e) { return e <= 1e-12 * std::max(1.0, scale); });
  if (rep.rounding_level) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double lx = std::log(radii[i]), ly = std::log(std::max(rep.errors[i], 1e-300));
    n += 1;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

}  // namespace hk
