#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/funcspace.hpp"

namespace hk {

TanhMeasure cosh_mollify(const RealFunction& fn, double epsilon, const MollifyOptions& opts) {
  require(epsilon > 0.0 && std::isfinite(epsilon), "cosh_mollify: epsilon must be positive");
  require(opts.atoms >= 16 && opts.window > 0.0, "cosh_mollify: invalid atom window");

  const double lo = fn.limit_at_minus_infinity();
  const double hi = fn.limit_at_plus_infinity();

  // d mu = f'/2 ds, midpoint rule on a uniform atom grid.
  const double h = 2.0 * opts.window / opts.atoms;
  std::vector<double> slope(static_cast<std::size_t>(opts.atoms));
  double peak = 0.0;
  for (int i = 0; i < opts.atoms; ++i) {
    slope[static_cast<std::size_t>(i)] = fn.derivative(-opts.window + (i + 0.5) * h);
    peak = std::max(peak, std::abs(slope[static_cast<std::size_t>(i)]));
  }

  std::vector<Atom> atoms;
  atoms.reserve(slope.size());
  double mass = 0.0;
  for (int i = 0; i < opts.atoms; ++i) {
    double d = slope[static_cast<std::size_t>(i)];
    const double s = -opts.window + (i + 0.5) * h;
    if (d < -opts.monotonicity_tolerance * std::max(1.0, peak)) {
      std::ostringstream os;
      os << "cosh_mollify: " << fn.describe() << " is not increasing (f'(" << s << ") = " << d << ")";
      fail(ErrorKind::Monotonicity, os.str());
    }
    d = std::max(d, 0.0);
    if (d == 0.0) continue;
    atoms.push_back({s, 0.5 * h * d});
    mass += 0.5 * h * d;
  }

  const double target = 0.5 * (hi - lo);
  const double missing = std::abs(mass - target);
  if (missing > opts.truncation_tolerance * std::max(1.0, std::abs(target))) {
    std::ostringstream os;
    os << "cosh_mollify: derivative mass outside [-" << opts.window << ", " << opts.window
       << "] is " << missing;
    throw AccuracyError(ErrorKind::Truncation, os.str(), missing);
  }

  return TanhMeasure(std::move(atoms), 0.5 * (hi + lo), kPi * epsilon / 2.0);
}

}  // namespace hk
