#include <algorithm>
#include <cmath>
#include <sstream>

#include "hk/monotone.hpp"

namespace hk {

namespace {

double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::string label(const std::string& name, const Params& p) {
  std::ostringstream os;
  os << name;
  if (!p.empty()) {
    os << "(";
    bool first = true;
    for (const auto& [k, v] : p) {
      os << (first ? "" : ",") << k << "=" << v;
      first = false;
    }
    os << ")";
  }
  return os.str();
}

}  // namespace

std::vector<std::string> monotone_catalog_names() {
  return {"identity", "affine", "sqrt", "power", "log", "neg-inverse", "mobius", "tanh", "arctan", "square"};
}

MonotoneFunction monotone_catalog(const std::string& name, const Params& params) {
  MonotoneFunction m;
  m.name = label(name, params);
  const double c = param(params, "c", 0.0);
  if (name == "identity") {
    m.claimed_monotone = true;
    m.value = [](double x) { return x; };
    m.derivative = [](double) { return 1.0; };
  } else if (name == "affine") {
    const double a = param(params, "a", 1.0), b = param(params, "b", 0.0);
    if (!(a > 0.0)) fail(ErrorKind::Config, "monotone catalog: affine needs slope a > 0");
    m.claimed_monotone = true;
    m.value = [a, b](double x) { return a * x + b; };
    m.derivative = [a](double) { return a; };
  } else if (name == "sqrt") {
    m.lo = -c;
    m.claimed_monotone = true;
    m.value = [c](double x) { return std::sqrt(x + c); };
    m.derivative = [c](double x) { return 0.5 / std::sqrt(x + c); };
  } else if (name == "power") {
    const double s = param(params, "s", 0.5);
    if (!(s > 0.0)) fail(ErrorKind::Config, "monotone catalog: power needs s > 0");
    m.lo = -c;
    m.claimed_monotone = s <= 1.0;
    m.value = [c, s](double x) { return std::pow(x + c, s); };
    m.derivative = [c, s](double x) { return s * std::pow(x + c, s - 1.0); };
  } else if (name == "log") {
    m.lo = -c;
    m.claimed_monotone = true;
    m.value = [c](double x) { return std::log(x + c); };
    m.derivative = [c](double x) { return 1.0 / (x + c); };
  } else if (name == "neg-inverse") {
    m.lo = -c;
    m.claimed_monotone = true;
    m.value = [c](double x) { return -1.0 / (x + c); };
    m.derivative = [c](double x) { return 1.0 / ((x + c) * (x + c)); };
  } else if (name == "mobius") {
    const double a = param(params, "a", 1.0), b = param(params, "b", 0.0);
    const double cc = param(params, "c", 0.0), d = param(params, "d", 1.0);
    const double det = a * d - b * cc;
    if (cc == 0.0 && d == 0.0) fail(ErrorKind::Config, "monotone catalog: mobius with c = d = 0");
    if (cc != 0.0) m.lo = -d / cc;
    m.claimed_monotone = det > 0.0;
    m.value = [a, b, cc, d](double x) { return (a * x + b) / (cc * x + d); };
    m.derivative = [det, cc, d](double x) { return det / ((cc * x + d) * (cc * x + d)); };
  } else if (name == "tanh") {
    m.claimed_monotone = true;
    m.value = [](double x) { return std::tanh(x); };
    m.derivative = [](double x) {
      const double s = 1.0 / std::cosh(x);
      return s * s;
    };
  } else if (name == "arctan") {
    m.claimed_monotone = true;
    m.value = [](double x) { return std::atan(x); };
    m.derivative = [](double x) { return 1.0 / (1.0 + x * x); };
  } else if (name == "square") {
    m.value = [](double x) { return x * x; };
    m.derivative = [](double x) { return 2.0 * x; };
  } else {
    fail(ErrorKind::Config, "monotone catalog: unknown function '" + name + "'");
  }
  m.lo = std::max(m.lo, param(params, "lo", -kInf));
  m.hi = std::min(m.hi, param(params, "hi", kInf));
  if (!(m.lo < m.hi)) fail(ErrorKind::Config, "monotone catalog: empty domain for " + m.name);
  return m;
}

std::vector<MonotoneFunction> claimed_monotone_instances() {
  return {
      monotone_catalog("identity"),
      monotone_catalog("affine", {{"a", 2.0}, {"b", 1.0}}),
      monotone_catalog("sqrt"),
      monotone_catalog("power", {{"s", 1.0 / 3.0}}),
      monotone_catalog("power", {{"s", 0.5}}),
      monotone_catalog("power", {{"s", 0.75}}),
      monotone_catalog("log"),
      monotone_catalog("neg-inverse"),
      monotone_catalog("mobius", {{"a", 1.0}, {"b", 2.0}, {"c", 1.0}, {"d", 3.0}}),
      monotone_catalog("tanh"),
      monotone_catalog("arctan"),
  };
}

}  // namespace hk
