#pragma once

// Operator-monotone catalog, a randomized Loewner-order test on symmetric
// matrices, and composition of commutator pairs with monotone functions.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hk/commutator.hpp"

namespace hk {

struct MonotoneFunction {
  std::string name;
  double lo = -kInf, hi = kInf;  // open domain interval
  bool claimed_monotone = false;
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  bool in_domain(double x) const { return x > lo && x < hi; }
};

using Params = std::map<std::string, double>;

/// Catalog entries: identity, affine{a,b}, sqrt{c}, power{s,c}, log{c}, neg-inverse{c},
/// mobius{a,b,c,d}, tanh, arctan, square. Optional lo/hi narrow the domain.
MonotoneFunction monotone_catalog(const std::string& name, const Params& params = {});
std::vector<std::string> monotone_catalog_names();

/// The claimed-monotone instances exercised by the property suite.
std::vector<MonotoneFunction> claimed_monotone_instances();

struct LoewnerOptions {
  int n = 3;
  int trials = 1000;
  std::uint64_t seed = 1;
  int max_retries = 100;
  double tolerance = 1e-10;
};

struct LoewnerReport {
  std::string name;
  int n = 0;
  int trials = 0;
  int violations = 0;
  int first_violation = -1;  // trial index, -1 if none
  int resamples = 0;
  double min_eig = kInf;     // smallest eigenvalue of F(A) - F(B) over trials
  double scale = 0.0;
  double test_lo = 0.0, test_hi = 0.0;
  bool pass = false;
};

/// Random A >= B with spectra in a compact sub-interval of the domain; checks F(A) >= F(B).
LoewnerReport loewner_matrix_test(const MonotoneFunction& fn, const LoewnerOptions& opts = {});

/// Compact test interval inside the open domain.
std::pair<double, double> loewner_test_interval(const MonotoneFunction& fn);

/// (F o f, G o g); ranges must sit inside the open domains.
FunctionPair compose_pair(const MonotoneFunction& F, const RealFunction& f, const MonotoneFunction& G,
                          const RealFunction& g);

/// Closed range [inf, sup] of a catalog function (limits for monotone, +-sup bound otherwise).
std::pair<double, double> function_range(const RealFunction& fn);

SpectralReport composition_positivity_experiment(const MonotoneFunction& F, const RealFunction& f,
                                                 const MonotoneFunction& G, const RealFunction& g,
                                                 const Grid& grid, const SpectrumOptions& opts = {});

}  // namespace hk
