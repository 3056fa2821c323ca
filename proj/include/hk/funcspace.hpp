#pragma once

// Bounded real functions of one variable, the tanh-measure class and its
// diagnostics: mollifiers, exponential moments, strip positivity, fitting.

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hk/errors.hpp"

namespace hk {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Total variation [f] = f(+inf) - f(-inf) of a bounded monotone function.
struct VariationBracket {
  double value = 0.0;
};

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// f(t) = sum_i w_i tanh(rate * (t - s_i)) + offset, rate = pi / (2 alpha).
class TanhMeasure {
 public:
  TanhMeasure(std::vector<Atom> atoms, double offset, double alpha);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double offset() const { return offset_; }
  double alpha() const { return alpha_; }
  double rate() const { return kPi / (2.0 * alpha_); }
  double total_weight() const;
  VariationBracket bracket() const { return {2.0 * total_weight()}; }

  double value(double t) const;
  cplx value(cplx z) const;
  double derivative(double t) const;

 private:
  std::vector<Atom> atoms_;
  double offset_;
  double alpha_;
};

enum class TermKind { Constant, Tanh, Arctan, Sine };

/// One catalog term: amplitude * shape(rate * (t - shift)).
struct Term {
  TermKind kind = TermKind::Constant;
  double amplitude = 0.0;
  double rate = 1.0;
  double shift = 0.0;
};

struct ClosedForm {
  std::string name;
  std::vector<Term> terms;
};

/// Values on strictly increasing nodes; cubic Hermite between nodes, clamped outside.
struct Sampled {
  std::vector<double> t;
  std::vector<double> v;
  std::vector<double> dv;  // node derivatives, 4th-order differences where possible
};

class RealFunction;

/// Convolution with the Gaussian of standard deviation `width`.
struct Smoothed {
  std::shared_ptr<const RealFunction> base;
  double width = 1.0;
};

/// outer(inner(t)); outer supplied as plain callables by the monotone catalog.
struct Composed {
  std::string outer_name;
  std::function<double(double)> outer;
  std::function<double(double)> outer_derivative;
  std::shared_ptr<const RealFunction> inner;
};

class RealFunction {
 public:
  using Variant = std::variant<ClosedForm, TanhMeasure, Sampled, Smoothed, Composed>;

  explicit RealFunction(Variant rep);

  const Variant& representation() const { return rep_; }
  std::string describe() const;

  double operator()(double t) const { return value(t); }
  double value(double t) const;
  double derivative(double t) const;
  /// (f(s) - f(t)) / (s - t) without cancellation in the tails; f'(s) when s == t.
  double difference_quotient(double s, double t) const;

  /// Checked complex evaluation inside the declared strip.
  cplx eval(cplx z) const;
  /// Meromorphic continuation without the strip check (closed forms and measures).
  cplx eval_continued(cplx z) const;
  bool supports_complex() const;
  /// Half-width of the analytic strip around the real axis (inf for entire).
  double strip_half_width() const;

  double limit_at_plus_infinity() const;
  double limit_at_minus_infinity() const;
  VariationBracket bracket() const;
  double sup_bound() const;
  bool claims_increasing() const;

  /// Closed-form transform of f' in the unitary convention, when one exists.
  std::optional<cplx> derivative_transform(cplx k) const;
  bool has_closed_form_transform() const;
  /// Largest |Im k| for which f' has finite exponential moments (0 if none).
  double moment_strip() const;

 private:
  Variant rep_;
};

// ---- catalog constructors ----

RealFunction constant_function(double c);
/// c * tanh(a (t - t0)) + d
RealFunction tanh_affine(double c, double a, double t0 = 0.0, double d = 0.0);
/// c * atan(b (t - t0)) + d
RealFunction arctan_affine(double c, double b, double t0 = 0.0, double d = 0.0);
/// c * sin(w (t - t0)) + d
RealFunction sine_function(double c, double w, double t0 = 0.0, double d = 0.0);
RealFunction sum_of(const std::vector<RealFunction>& parts, std::string name = "sum");
RealFunction from_measure(TanhMeasure measure);
RealFunction sampled_function(std::vector<double> t, std::vector<double> v);
/// Two-column text (t, f(t)) with strictly increasing t.
RealFunction read_samples(const std::string& path);
RealFunction composed_function(std::string outer_name, std::function<double(double)> outer,
                               std::function<double(double)> outer_derivative,
                               const RealFunction& inner);
/// t -> -fn(-t); the partner that carries the momentum picture to the position picture.
RealFunction reflect(const RealFunction& fn);

// ---- mollifiers ----

struct MollifyOptions {
  double window = 24.0;
  int atoms = 4096;
  double truncation_tolerance = 1e-8;
  double monotonicity_tolerance = 1e-12;
};

/// phi_eps * f as a tanh measure with alpha = pi*eps/2.
TanhMeasure cosh_mollify(const RealFunction& fn, double epsilon, const MollifyOptions& opts = {});

/// psi_width * f, evaluable at any complex point by quadrature of the shifted Gaussian.
RealFunction gaussian_mollify(const RealFunction& fn, double width);

// ---- exponential moments and decay ----

struct MomentResult {
  double value = 0.0;
  double tail_estimate = 0.0;  // extrapolated mass beyond the window
  double edge_log_slope = 0.0;
  bool divergent = false;
};

/// Integral of f'(t) e^{2bt} over [-window, window].
MomentResult exp_moment(const std::function<double(double)>& derivative, double b,
                        double window, int nodes = 0);

struct DecayFit {
  double rate = 0.0;  // beta in f'(t) ~ C exp(-2 beta |t|)
  double log_prefactor = 0.0;
  double residual = 0.0;
  double implied_partner_strip() const { return kPi / (2.0 * rate); }
};

/// Least-squares fit of log f' over the outer half of [-window, window].
DecayFit estimate_decay_rate(const std::function<double(double)>& derivative,
                             double window = 24.0, double residual_threshold = 1e-3);

// ---- strip positivity ----

struct HerglotzReport {
  double alpha = 0.0;
  double min_imag = 0.0;
  cplx argmin{};
  int points = 0;
  int skipped_poles = 0;
  bool exceeds_analytic_strip = false;
  bool pass = false;
};

/// Samples {0 < Im z < 0.95 alpha, |Re z| <= window} and checks Im f(z) >= -tol.
HerglotzReport herglotz_check(const RealFunction& fn, double alpha, int samples,
                              double window = 24.0, double tol = 1e-10);

// ---- measure fitting ----

struct NnlsResult {
  std::vector<double> x;
  double residual_norm = 0.0;
  double projected_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
/// A is column-major with `rows` rows.
NnlsResult nnls(const std::vector<double>& a, int rows, int cols, const std::vector<double>& b,
                double gradient_tol = 1e-10, int max_iterations = 0);

struct FitOptions {
  double membership_threshold = 1e-4;
  double atom_floor = 1e-6;  // effective atoms lighter than this fraction of the mass are dropped
};

struct MeasureFit {
  TanhMeasure measure;
  double residual = 0.0;              // relative L2 residual of the derivative fit
  std::vector<Atom> effective_atoms;  // contiguous support clusters merged
  bool member = false;
  bool conditioning_warning = false;
};

MeasureFit fit_tanh_measure(const std::vector<double>& t, const std::vector<double>& f,
                            double alpha, const std::vector<double>& atom_grid,
                            const FitOptions& opts = {});

}  // namespace hk
