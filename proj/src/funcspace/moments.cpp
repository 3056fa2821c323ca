#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/funcspace.hpp"

namespace hk {

MomentResult exp_moment(const std::function<double(double)>& derivative, double b, double window,
                        int nodes) {
  require(window > 0.0 && std::isfinite(window), "exp_moment: window must be positive");
  if (nodes <= 0) nodes = std::max(4001, static_cast<int>(200.0 * window) + 1);
  const double h = 2.0 * window / (nodes - 1);

  auto integrand = [&](double t) {
    const double d = derivative(t);
    if (d < -1e-12) {
      std::ostringstream os;
      os << "exp_moment: negative derivative " << d << " at t = " << t;
      fail(ErrorKind::Monotonicity, os.str());
    }
    return std::max(d, 0.0) * std::exp(2.0 * b * t);
  };

  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    sum += w * integrand(-window + i * h);
  }

  MomentResult r;
  r.value = sum * h;

  // Outward log-slope of the integrand over the last unit of the window, each side.
  const double step = std::min(1.0, 0.25 * window);
  double tail = 0.0;
  double worst = -kInf;
  for (double sign : {1.0, -1.0}) {
    const double edge = integrand(sign * window);
    const double inner = integrand(sign * (window - step));
    if (edge <= 0.0) continue;
    const double slope = (inner > 0.0) ? (std::log(edge) - std::log(inner)) / step : kInf;
    worst = std::max(worst, slope);
    if (slope < 0.0) tail += edge / -slope;
  }
  r.edge_log_slope = worst;
  r.tail_estimate = tail;
  r.divergent = worst > -1e-3;
  if (r.divergent) r.tail_estimate = kInf;
  return r;
}

DecayFit estimate_decay_rate(const std::function<double(double)>& derivative, double window,
                             double residual_threshold) {
  require(window > 0.0, "estimate_decay_rate: window must be positive");
  constexpr int kPerSide = 64;
  std::vector<double> xs, ys;
  for (double sign : {1.0, -1.0}) {
    for (int i = 0; i < kPerSide; ++i) {
      const double t = sign * (0.5 * window + 0.5 * window * i / (kPerSide - 1));
      const double d = derivative(t);
      if (d < 0.0) {
        std::ostringstream os;
        os << "estimate_decay_rate: derivative negative at t = " << t;
        fail(ErrorKind::Monotonicity, os.str());
      }
      if (d < 1e-300) continue;
      xs.push_back(std::abs(t));
      ys.push_back(std::log(d));
    }
  }
  if (xs.size() < 8) fail(ErrorKind::FitQuality, "estimate_decay_rate: derivative underflows on the window");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    rss += e * e;
  }

  DecayFit fit;
  fit.rate = -slope / 2.0;
  fit.log_prefactor = intercept;
  fit.residual = std::sqrt(rss / n);
  if (fit.residual > residual_threshold || !(fit.rate > 0.0)) {
    std::ostringstream os;
    os << "estimate_decay_rate: tail is not exponential (rms log residual " << fit.residual << ")";
    throw AccuracyError(ErrorKind::FitQuality, os.str(), fit.residual);
  }
  return fit;
}

HerglotzReport herglotz_check(const RealFunction& fn, double alpha, int samples, double window,
                              double tol) {
  require(alpha > 0.0 && samples >= 2, "herglotz_check: need alpha > 0 and samples >= 2");
  HerglotzReport rep;
  rep.alpha = alpha;
  rep.min_imag = kInf;
  rep.exceeds_analytic_strip = alpha > fn.strip_half_width();
  // Throws for variants without a continuation.
  (void)fn.eval(cplx(0.0, 0.5 * std::min(alpha, fn.strip_half_width())));

  for (int iy = 1; iy <= samples; ++iy) {
    const double y = 0.95 * alpha * iy / samples;
    for (int ix = 0; ix < samples; ++ix) {
      const double x = -window + 2.0 * window * ix / (samples - 1);
      const cplx v = fn.eval_continued(cplx(x, y));
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e12) {
        ++rep.skipped_poles;
        continue;
      }
      ++rep.points;
      if (v.imag() < rep.min_imag) {
        rep.min_imag = v.imag();
        rep.argmin = cplx(x, y);
      }
    }
  }
  rep.pass = rep.min_imag >= -tol && !rep.exceeds_analytic_strip;
  return rep;
}

}  // namespace hk
