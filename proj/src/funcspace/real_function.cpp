#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hk/funcspace.hpp"

namespace hk {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Config: return "config";
    case ErrorKind::StripViolation: return "strip-violation";
    case ErrorKind::UnsupportedVariant: return "unsupported-variant";
    case ErrorKind::Monotonicity: return "monotonicity";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::FitQuality: return "fit-quality";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::RouteMismatch: return "route-mismatch";
    case ErrorKind::Periodization: return "periodization";
    case ErrorKind::DerivativeRequired: return "derivative-required";
    case ErrorKind::SignConstraint: return "sign-constraint";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::ProbeSelection: return "probe-selection";
    case ErrorKind::Containment: return "containment";
    case ErrorKind::SectionAbsent: return "section-absent";
  }
  return "unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sech2(double x) {
  const double c = std::cosh(x);
  return std::isinf(c) ? 0.0 : 1.0 / (c * c);
}

// x / sinh(x), analytic at 0; complex argument allowed.
template <class T>
T x_over_sinh(T x) {
  if (std::abs(x) < 1e-4) return T(1.0) - x * x / 6.0;
  if (std::real(x) > 700.0 || std::real(x) < -700.0) return T(0.0);
  return x / std::sinh(x);
}

// Transform of (c tanh(a(t - t0)))' at k: (c/sqrt(2pi)) e^{-i k t0} pi k / (a sinh(pi k / 2a)).
cplx tanh_term_transform(const Term& term, cplx k) {
  const cplx x = kPi * k / (2.0 * term.rate);
  return term.amplitude * 2.0 * x_over_sinh(x) * std::exp(cplx(0, -1) * k * term.shift) / kSqrt2Pi;
}

double term_value(const Term& term, double t) {
  const double u = term.rate * (t - term.shift);
  switch (term.kind) {
    case TermKind::Constant: return term.amplitude;
    case TermKind::Tanh: return term.amplitude * std::tanh(u);
    case TermKind::Arctan: return term.amplitude * std::atan(u);
    case TermKind::Sine: return term.amplitude * std::sin(u);
  }
  return 0.0;
}

cplx term_value(const Term& term, cplx z) {
  const cplx u = term.rate * (z - term.shift);
  switch (term.kind) {
    case TermKind::Constant: return term.amplitude;
    case TermKind::Tanh: return term.amplitude * std::tanh(u);
    case TermKind::Arctan: return term.amplitude * std::atan(u);
    case TermKind::Sine: return term.amplitude * std::sin(u);
  }
  return 0.0;
}

double term_derivative(const Term& term, double t) {
  const double u = term.rate * (t - term.shift);
  switch (term.kind) {
    case TermKind::Constant: return 0.0;
    case TermKind::Tanh: return term.amplitude * term.rate * sech2(u);
    case TermKind::Arctan: return term.amplitude * term.rate / (1.0 + u * u);
    case TermKind::Sine: return term.amplitude * term.rate * std::cos(u);
  }
  return 0.0;
}

double term_strip(const Term& term) {
  switch (term.kind) {
    case TermKind::Constant:
    case TermKind::Sine: return kInf;
    case TermKind::Tanh: return kPi / (2.0 * term.rate);
    case TermKind::Arctan: return 1.0 / term.rate;
  }
  return 0.0;
}

Term normalized(Term t) {
  if (t.kind != TermKind::Constant) {
    require(t.rate != 0.0 && std::isfinite(t.rate), "term rate must be finite and nonzero");
    if (t.rate < 0.0 && t.kind != TermKind::Sine) {
      t.rate = -t.rate;
      t.amplitude = -t.amplitude;
    }
  }
  return t;
}

std::vector<double> node_derivatives(const std::vector<double>& t, const std::vector<double>& v) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) uniform = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (uniform && i >= 2 && i + 2 < n) {
      d[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
    } else if (i > 0 && i + 1 < n) {
      const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
      d[i] = (-h1 / (h0 * (h0 + h1))) * v[i - 1] + ((h1 - h0) / (h0 * h1)) * v[i] +
             (h0 / (h1 * (h0 + h1))) * v[i + 1];
    } else if (i == 0) {
      d[i] = (v[1] - v[0]) / (t[1] - t[0]);
    } else {
      d[i] = (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
    }
  }
  return d;
}

std::size_t bracket_index(const std::vector<double>& t, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  return static_cast<std::size_t>(std::distance(t.begin(), it)) - 1;
}

double hermite_value(const Sampled& s, double x) {
  if (x <= s.t.front()) return s.v.front();
  if (x >= s.t.back()) return s.v.back();
  const std::size_t i = bracket_index(s.t, x);
  const double h = s.t[i + 1] - s.t[i];
  const double u = (x - s.t[i]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return h00 * s.v[i] + h10 * h * s.dv[i] + h01 * s.v[i + 1] + h11 * h * s.dv[i + 1];
}

double hermite_derivative(const Sampled& s, double x) {
  if (x < s.t.front() || x > s.t.back()) return 0.0;
  if (x == s.t.back()) return s.dv.back();
  const std::size_t i = bracket_index(s.t, x);
  const double h = s.t[i + 1] - s.t[i];
  const double u = (x - s.t[i]) / h;
  const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
  const double d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
  return (d00 * s.v[i] + d01 * s.v[i + 1]) / h + d10 * s.dv[i] + d11 * s.dv[i + 1];
}

// Trapezoid nodes for the Gaussian convolution of `sm`.
struct GaussRule {
  double step;
  int half;  // nodes at j*step for |j| <= half
};

GaussRule gauss_rule(const Smoothed& sm, double imag_shift) {
  double step = sm.width / 8.0;
  const double strip = sm.base->strip_half_width();
  if (strip > 0.0 && std::isfinite(strip)) step = std::min(step, strip / 4.0);
  if (strip == 0.0) step = sm.width / 16.0;
  if (imag_shift != 0.0) step = std::min(step, sm.width * sm.width / (4.0 * std::abs(imag_shift)));
  const double reach = 10.0 * sm.width + std::abs(imag_shift) * 2.0;
  return {step, static_cast<int>(std::ceil(reach / step))};
}

// Integral of psi_w(u + i b) * h(x - u) du by the trapezoid rule, with a half-resolution estimate.
template <class H>
std::pair<cplx, cplx> gauss_convolve(const Smoothed& sm, double x, double b, H&& h) {
  const GaussRule rule = gauss_rule(sm, b);
  const double w2 = sm.width * sm.width;
  const double norm = 1.0 / (sm.width * kSqrt2Pi);
  cplx full = 0.0, coarse = 0.0;
  for (int j = -rule.half; j <= rule.half; ++j) {
    const double u = j * rule.step;
    const cplx g = norm * std::exp(-(cplx(u, b) * cplx(u, b)) / (2.0 * w2));
    const cplx term = g * h(x - u);
    full += term;
    if (j % 2 == 0) coarse += term;
  }
  return {full * rule.step, coarse * 2.0 * rule.step};
}

template <class H>
cplx checked_gauss(const Smoothed& sm, double x, double b, H&& h) {
  auto [full, coarse] = gauss_convolve(sm, x, b, h);
  const double err = std::abs(full - coarse);
  if (err > 1e-8 * std::max(1.0, std::abs(full)))
    throw AccuracyError(ErrorKind::Accuracy, "Gaussian smoothing quadrature did not converge", err);
  return full;
}

}  // namespace

// ---------------- TanhMeasure ----------------

TanhMeasure::TanhMeasure(std::vector<Atom> atoms, double offset, double alpha)
    : atoms_(std::move(atoms)), offset_(offset), alpha_(alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), "tanh measure: strip half-width must be positive");
  for (const Atom& a : atoms_)
    require(a.weight >= 0.0 && std::isfinite(a.location), "tanh measure: weights must be nonnegative");
}

double TanhMeasure::total_weight() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

double TanhMeasure::value(double t) const {
  const double r = rate();
  double s = offset_;
  for (const Atom& a : atoms_) s += a.weight * std::tanh(r * (t - a.location));
  return s;
}

cplx TanhMeasure::value(cplx z) const {
  const double r = rate();
  cplx s = offset_;
  for (const Atom& a : atoms_) s += a.weight * std::tanh(r * (z - a.location));
  return s;
}

double TanhMeasure::derivative(double t) const {
  const double r = rate();
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight * r * sech2(r * (t - a.location));
  return s;
}

// ---------------- RealFunction ----------------

RealFunction::RealFunction(Variant rep) : rep_(std::move(rep)) {}

std::string RealFunction::describe() const {
  return std::visit(
      overloaded{
          [](const ClosedForm& cf) { return cf.name; },
          [](const TanhMeasure& m) {
            std::ostringstream os;
            os << "tanh-measure(atoms=" << m.atoms().size() << ",alpha=" << m.alpha() << ")";
            return os.str();
          },
          [](const Sampled& s) {
            std::ostringstream os;
            os << "samples(n=" << s.t.size() << ")";
            return os.str();
          },
          [](const Smoothed& s) {
            std::ostringstream os;
            os << "gauss(" << s.width << ")*" << s.base->describe();
            return os.str();
          },
          [](const Composed& c) { return c.outer_name + "(" + c.inner->describe() + ")"; },
      },
      rep_);
}

double RealFunction::value(double t) const {
  return std::visit(overloaded{
                        [t](const ClosedForm& cf) {
                          double s = 0.0;
                          for (const Term& term : cf.terms) s += term_value(term, t);
                          return s;
                        },
                        [t](const TanhMeasure& m) { return m.value(t); },
                        [t](const Sampled& s) { return hermite_value(s, t); },
                        [t](const Smoothed& sm) {
                          return checked_gauss(sm, t, 0.0, [&](double x) { return sm.base->value(x); }).real();
                        },
                        [t](const Composed& c) { return c.outer(c.inner->value(t)); },
                    },
                    rep_);
}

double RealFunction::derivative(double t) const {
  return std::visit(overloaded{
                        [t](const ClosedForm& cf) {
                          double s = 0.0;
                          for (const Term& term : cf.terms) s += term_derivative(term, t);
                          return s;
                        },
                        [t](const TanhMeasure& m) { return m.derivative(t); },
                        [t](const Sampled& s) { return hermite_derivative(s, t); },
                        [t](const Smoothed& sm) {
                          return checked_gauss(sm, t, 0.0, [&](double x) { return sm.base->derivative(x); })
                              .real();
                        },
                        [t](const Composed& c) {
                          return c.outer_derivative(c.inner->value(t)) * c.inner->derivative(t);
                        },
                    },
                    rep_);
}

bool RealFunction::supports_complex() const {
  return std::holds_alternative<ClosedForm>(rep_) || std::holds_alternative<TanhMeasure>(rep_) ||
         std::holds_alternative<Smoothed>(rep_);
}

double RealFunction::strip_half_width() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          double s = kInf;
                          for (const Term& term : cf.terms) s = std::min(s, term_strip(term));
                          return s;
                        },
                        [](const TanhMeasure& m) { return m.atoms().empty() ? kInf : m.alpha(); },
                        [](const Sampled&) { return 0.0; },
                        [](const Smoothed&) { return kInf; },
                        [](const Composed&) { return 0.0; },
                    },
                    rep_);
}

cplx RealFunction::eval_continued(cplx z) const {
  if (z.imag() == 0.0) return {value(z.real()), 0.0};
  return std::visit(
      overloaded{
          [z](const ClosedForm& cf) {
            cplx s = 0.0;
            for (const Term& term : cf.terms) s += term_value(term, z);
            return s;
          },
          [z](const TanhMeasure& m) { return m.value(z); },
          [](const Sampled&) -> cplx {
            fail(ErrorKind::UnsupportedVariant, "sampled functions have no complex continuation");
          },
          [z](const Smoothed& sm) {
            // psi_w(z - s) is entire in z; only real samples of the base are needed.
            return checked_gauss(sm, z.real(), z.imag(), [&](double x) { return sm.base->value(x); });
          },
          [](const Composed&) -> cplx {
            fail(ErrorKind::UnsupportedVariant, "composed functions have no complex continuation");
          },
      },
      rep_);
}

cplx RealFunction::eval(cplx z) const {
  if (z.imag() == 0.0) return {value(z.real()), 0.0};
  if (!supports_complex())
    fail(ErrorKind::UnsupportedVariant, describe() + ": complex evaluation not supported");
  const double strip = strip_half_width();
  if (!(std::abs(z.imag()) < strip)) {
    std::ostringstream os;
    os << describe() << ": |Im z| = " << std::abs(z.imag()) << " outside strip half-width " << strip;
    fail(ErrorKind::StripViolation, os.str());
  }
  return eval_continued(z);
}

double RealFunction::limit_at_plus_infinity() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          double s = 0.0;
                          for (const Term& term : cf.terms) {
                            switch (term.kind) {
                              case TermKind::Constant: s += term.amplitude; break;
                              case TermKind::Tanh: s += term.amplitude; break;
                              case TermKind::Arctan: s += term.amplitude * kPi / 2.0; break;
                              case TermKind::Sine:
                                fail(ErrorKind::UnsupportedVariant, cf.name + ": no limit at infinity");
                            }
                          }
                          return s;
                        },
                        [](const TanhMeasure& m) { return m.offset() + m.total_weight(); },
                        [](const Sampled& s) { return s.v.back(); },
                        [](const Smoothed& sm) { return sm.base->limit_at_plus_infinity(); },
                        [](const Composed& c) { return c.outer(c.inner->limit_at_plus_infinity()); },
                    },
                    rep_);
}

double RealFunction::limit_at_minus_infinity() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          double s = 0.0;
                          for (const Term& term : cf.terms) {
                            switch (term.kind) {
                              case TermKind::Constant: s += term.amplitude; break;
                              case TermKind::Tanh: s -= term.amplitude; break;
                              case TermKind::Arctan: s -= term.amplitude * kPi / 2.0; break;
                              case TermKind::Sine:
                                fail(ErrorKind::UnsupportedVariant, cf.name + ": no limit at infinity");
                            }
                          }
                          return s;
                        },
                        [](const TanhMeasure& m) { return m.offset() - m.total_weight(); },
                        [](const Sampled& s) { return s.v.front(); },
                        [](const Smoothed& sm) { return sm.base->limit_at_minus_infinity(); },
                        [](const Composed& c) { return c.outer(c.inner->limit_at_minus_infinity()); },
                    },
                    rep_);
}

VariationBracket RealFunction::bracket() const {
  return {limit_at_plus_infinity() - limit_at_minus_infinity()};
}

double RealFunction::sup_bound() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          double s = 0.0;
                          for (const Term& term : cf.terms)
                            s += std::abs(term.amplitude) * (term.kind == TermKind::Arctan ? kPi / 2.0 : 1.0);
                          return s;
                        },
                        [](const TanhMeasure& m) { return std::abs(m.offset()) + m.total_weight(); },
                        [](const Sampled& s) {
                          double m = 0.0;
                          for (double v : s.v) m = std::max(m, std::abs(v));
                          return m;
                        },
                        [](const Smoothed& sm) { return sm.base->sup_bound(); },
                        [](const Composed& c) {
                          return std::max(std::abs(c.outer(c.inner->limit_at_plus_infinity())),
                                          std::abs(c.outer(c.inner->limit_at_minus_infinity())));
                        },
                    },
                    rep_);
}

bool RealFunction::claims_increasing() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          for (const Term& term : cf.terms) {
                            if (term.kind == TermKind::Sine) return false;
                            if (term.kind != TermKind::Constant && term.amplitude < 0.0) return false;
                          }
                          return true;
                        },
                        [](const TanhMeasure&) { return true; },
                        [](const Sampled& s) {
                          return std::is_sorted(s.v.begin(), s.v.end());
                        },
                        [](const Smoothed& sm) { return sm.base->claims_increasing(); },
                        [](const Composed& c) { return c.inner->claims_increasing(); },
                    },
                    rep_);
}

double RealFunction::moment_strip() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          double s = kInf;
                          for (const Term& term : cf.terms) {
                            if (term.kind == TermKind::Tanh) s = std::min(s, 2.0 * term.rate);
                            if (term.kind == TermKind::Arctan || term.kind == TermKind::Sine) s = 0.0;
                          }
                          return s;
                        },
                        [](const TanhMeasure& m) { return m.atoms().empty() ? kInf : 2.0 * m.rate(); },
                        [](const Sampled&) { return 0.0; },
                        [](const Smoothed& sm) { return sm.base->moment_strip(); },
                        [](const Composed&) { return 0.0; },
                    },
                    rep_);
}

bool RealFunction::has_closed_form_transform() const {
  return std::visit(overloaded{
                        [](const ClosedForm& cf) {
                          return std::none_of(cf.terms.begin(), cf.terms.end(),
                                              [](const Term& t) { return t.kind == TermKind::Sine; });
                        },
                        [](const TanhMeasure&) { return true; },
                        [](const Sampled&) { return false; },
                        [](const Smoothed& sm) { return sm.base->has_closed_form_transform(); },
                        [](const Composed&) { return false; },
                    },
                    rep_);
}

std::optional<cplx> RealFunction::derivative_transform(cplx k) const {
  if (!has_closed_form_transform()) return std::nullopt;
  if (k.imag() != 0.0 && !(std::abs(k.imag()) < moment_strip())) {
    std::ostringstream os;
    os << describe() << ": transform of f' diverges at Im k = " << k.imag() << " (moment strip "
       << moment_strip() << ")";
    fail(ErrorKind::Divergence, os.str());
  }
  return std::visit(overloaded{
                        [k](const ClosedForm& cf) -> std::optional<cplx> {
                          cplx s = 0.0;
                          for (const Term& term : cf.terms) {
                            if (term.kind == TermKind::Tanh) s += tanh_term_transform(term, k);
                            if (term.kind == TermKind::Arctan)
                              s += term.amplitude * kPi * std::exp(-std::abs(k.real()) / term.rate) *
                                   std::exp(cplx(0, -1) * k * term.shift) / kSqrt2Pi;
                          }
                          return s;
                        },
                        [k](const TanhMeasure& m) -> std::optional<cplx> {
                          cplx s = 0.0;
                          for (const Atom& a : m.atoms())
                            s += tanh_term_transform({TermKind::Tanh, a.weight, m.rate(), a.location}, k);
                          return s;
                        },
                        [](const Sampled&) -> std::optional<cplx> { return std::nullopt; },
                        [k](const Smoothed& sm) -> std::optional<cplx> {
                          auto base = sm.base->derivative_transform(k);
                          if (!base) return std::nullopt;
                          return std::exp(-sm.width * sm.width * k * k / 2.0) * *base;
                        },
                        [](const Composed&) -> std::optional<cplx> { return std::nullopt; },
                    },
                    rep_);
}

// ---------------- constructors ----------------

namespace {
std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

RealFunction single_term(const char* label, TermKind kind, double c, double a, double t0, double d) {
  ClosedForm cf;
  cf.name = std::string(label) + "(c=" + fmt_num(c) + ",a=" + fmt_num(a) + ",t0=" + fmt_num(t0) +
            ",d=" + fmt_num(d) + ")";
  cf.terms.push_back(normalized({kind, c, a, t0}));
  if (d != 0.0) cf.terms.push_back({TermKind::Constant, d, 1.0, 0.0});
  return RealFunction(std::move(cf));
}
}  // namespace

RealFunction constant_function(double c) {
  ClosedForm cf;
  cf.name = "constant(" + fmt_num(c) + ")";
  cf.terms.push_back({TermKind::Constant, c, 1.0, 0.0});
  return RealFunction(std::move(cf));
}

RealFunction tanh_affine(double c, double a, double t0, double d) {
  return single_term("tanh-affine", TermKind::Tanh, c, a, t0, d);
}

RealFunction arctan_affine(double c, double b, double t0, double d) {
  return single_term("arctan-affine", TermKind::Arctan, c, b, t0, d);
}

RealFunction sine_function(double c, double w, double t0, double d) {
  return single_term("sine", TermKind::Sine, c, w, t0, d);
}

RealFunction sum_of(const std::vector<RealFunction>& parts, std::string name) {
  ClosedForm cf;
  cf.name = std::move(name);
  for (const RealFunction& p : parts) {
    const auto* inner = std::get_if<ClosedForm>(&p.representation());
    require(inner != nullptr, "sum_of: only closed-form parts can be summed");
    cf.terms.insert(cf.terms.end(), inner->terms.begin(), inner->terms.end());
  }
  return RealFunction(std::move(cf));
}

RealFunction from_measure(TanhMeasure measure) { return RealFunction(std::move(measure)); }

RealFunction sampled_function(std::vector<double> t, std::vector<double> v) {
  require(t.size() == v.size() && t.size() >= 5, "samples: need at least 5 (t, f) pairs");
  for (std::size_t i = 1; i < t.size(); ++i)
    require(t[i] > t[i - 1], "samples: t must be strictly increasing");
  Sampled s;
  s.dv = node_derivatives(t, v);
  s.t = std::move(t);
  s.v = std::move(v);
  return RealFunction(std::move(s));
}

RealFunction read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open sample file '" + path + "'");
  std::vector<double> t, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b))
      fail(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": expected two columns");
    if (!t.empty() && !(a > t.back()))
      fail(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": t not strictly increasing");
    t.push_back(a);
    v.push_back(b);
  }
  if (t.size() < 5) fail(ErrorKind::Config, path + ": fewer than 5 samples");
  return sampled_function(std::move(t), std::move(v));
}

RealFunction composed_function(std::string outer_name, std::function<double(double)> outer,
                               std::function<double(double)> outer_derivative,
                               const RealFunction& inner) {
  Composed c;
  c.outer_name = std::move(outer_name);
  c.outer = std::move(outer);
  c.outer_derivative = std::move(outer_derivative);
  c.inner = std::make_shared<const RealFunction>(inner);
  return RealFunction(std::move(c));
}

RealFunction gaussian_mollify(const RealFunction& fn, double width) {
  require(width > 0.0 && std::isfinite(width), "gaussian_mollify: width must be positive");
  Smoothed s;
  s.base = std::make_shared<const RealFunction>(fn);
  s.width = width;
  return RealFunction(std::move(s));
}

}  // namespace hk

namespace hk {

RealFunction reflect(const RealFunction& fn) {
  return std::visit(
      overloaded{
          [](const ClosedForm& cf) {
            ClosedForm r;
            r.name = "reflect(" + cf.name + ")";
            for (Term t : cf.terms) {
              if (t.kind == TermKind::Constant) t.amplitude = -t.amplitude;
              else t.shift = -t.shift;
              r.terms.push_back(t);
            }
            return RealFunction(std::move(r));
          },
          [](const TanhMeasure& m) {
            std::vector<Atom> atoms;
            for (auto it = m.atoms().rbegin(); it != m.atoms().rend(); ++it)
              atoms.push_back({-it->location, it->weight});
            return RealFunction(TanhMeasure(std::move(atoms), -m.offset(), m.alpha()));
          },
          [](const Sampled& s) {
            std::vector<double> t(s.t.rbegin(), s.t.rend()), v(s.v.rbegin(), s.v.rend());
            for (double& x : t) x = -x;
            for (double& x : v) x = -x;
            return sampled_function(std::move(t), std::move(v));
          },
          [&fn](const auto&) -> RealFunction {
            fail(ErrorKind::UnsupportedVariant, "reflect: not available for " + fn.describe());
          },
      },
      fn.representation());
}

}  // namespace hk

namespace hk {

namespace {

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_abs_sinh(double d) {
  const double a = std::abs(d);
  if (a < 1.0) return std::log(std::sinh(a));
  return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0);
}

// (tanh(a(s - t0)) - tanh(a(t - t0))) / (s - t) via sinh(u1 - u2) / (cosh u1 cosh u2).
double tanh_quotient(double a, double t0, double s, double t) {
  const double u1 = a * (s - t0), u2 = a * (t - t0), d = u1 - u2;
  if (d == 0.0) return 0.0;
  const double mag = std::exp(log_abs_sinh(d) - log_cosh(u1) - log_cosh(u2));
  return (d > 0 ? mag : -mag) / (s - t);
}

double term_quotient(const Term& term, double s, double t) {
  switch (term.kind) {
    case TermKind::Constant: return 0.0;
    case TermKind::Tanh: return term.amplitude * tanh_quotient(term.rate, term.shift, s, t);
    case TermKind::Arctan: {
      const double a = term.rate * (s - term.shift), b = term.rate * (t - term.shift);
      if (a * b > -1.0) return term.amplitude * std::atan((a - b) / (1.0 + a * b)) / (s - t);
      return term.amplitude * (std::atan(a) - std::atan(b)) / (s - t);
    }
    case TermKind::Sine: {
      const double a = term.rate * (s - term.shift), b = term.rate * (t - term.shift);
      return term.amplitude * 2.0 * std::cos(0.5 * (a + b)) * std::sin(0.5 * (a - b)) / (s - t);
    }
  }
  return 0.0;
}

}  // namespace

double RealFunction::difference_quotient(double s, double t) const {
  if (s == t) return derivative(s);
  if (const auto* cf = std::get_if<ClosedForm>(&rep_)) {
    double q = 0.0;
    for (const Term& term : cf->terms) q += term_quotient(term, s, t);
    return q;
  }
  if (const auto* m = std::get_if<TanhMeasure>(&rep_)) {
    double q = 0.0;
    for (const Atom& a : m->atoms()) q += a.weight * tanh_quotient(m->rate(), a.location, s, t);
    return q;
  }
  return (value(s) - value(t)) / (s - t);
}

}  // namespace hk
