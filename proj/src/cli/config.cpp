#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hk/cli.hpp"

namespace hk {

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "build-kernel", "spectrum",     "verify-pair", "trace-check", "rank1",       "rank3",       "gamma-recover",
      "compose",      "loewner-test", "fit-measure", "deriv-avg",   "strip-check", "moment-scan"};
  return kinds;
}

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::Config, field + ": " + what);
}

// Recursive descent over + - * / ( ) with the constant pi.
class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) throw std::invalid_argument("unexpected '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) throw std::invalid_argument("missing ')'");
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    std::size_t used = 0;
    const double v = std::stod(s_.substr(pos_), &used);
    pos_ += used;
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

double number_or(const json& obj, const std::string& key, double fallback, const std::string& field) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return parse_number(obj.at(key), field + "." + key);
}

const json& require_key(const json& obj, const std::string& key, const std::string& field) {
  if (!obj.is_object() || !obj.contains(key)) config_error(field, "missing required field '" + key + "'");
  return obj.at(key);
}

}  // namespace

double eval_expression(const std::string& text) {
  ExprParser p(text);
  return p.parse();
}

double parse_number(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      const double x = eval_expression(v.get<std::string>());
      if (!std::isfinite(x)) config_error(field, "expression is not finite");
      return x;
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      config_error(field, "cannot parse number '" + v.get<std::string>() + "' (" + e.what() + ")");
    }
  }
  config_error(field, "expected a number or numeric expression");
}

RealFunction parse_function(const json& desc, const std::string& field, const std::string& base_dir) {
  if (!desc.is_object()) config_error(field, "function descriptor must be an object");
  const json& name_v = require_key(desc, "name", field);
  if (!name_v.is_string()) config_error(field + ".name", "expected a string");
  const std::string name = name_v.get<std::string>();
  // Parameters live under "params"; flat descriptors are accepted too.
  const json& params = desc.contains("params") ? desc.at("params") : desc;
  const std::string pf = desc.contains("params") ? field + ".params" : field;
  if (!params.is_object()) config_error(pf, "expected an object");

  auto num = [&](const char* key, double fallback) { return number_or(params, key, fallback, pf); };
  if (name == "tanh-affine") return tanh_affine(num("c", 1.0), num("a", 1.0), num("t0", 0.0), num("d", 0.0));
  if (name == "arctan-affine") return arctan_affine(num("c", 1.0), num("b", 1.0), num("t0", 0.0), num("d", 0.0));
  if (name == "sine") return sine_function(num("c", 1.0), num("w", 1.0), num("t0", 0.0), num("d", 0.0));
  if (name == "constant") return constant_function(num("c", 0.0));
  if (name == "sum") {
    const json& terms = require_key(params, "terms", pf);
    if (!terms.is_array() || terms.empty()) config_error(pf + ".terms", "expected a non-empty array");
    std::vector<RealFunction> parts;
    for (std::size_t i = 0; i < terms.size(); ++i)
      parts.push_back(parse_function(terms[i], pf + ".terms[" + std::to_string(i) + "]", base_dir));
    return sum_of(parts, params.value("label", std::string("sum")));
  }
  if (name == "tanh-measure") {
    const json& atoms = require_key(params, "atoms", pf);
    if (!atoms.is_array()) config_error(pf + ".atoms", "expected an array of [location, weight]");
    std::vector<Atom> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string af = pf + ".atoms[" + std::to_string(i) + "]";
      if (!atoms[i].is_array() || atoms[i].size() != 2) config_error(af, "expected [location, weight]");
      const double w = parse_number(atoms[i][1], af + "[1]");
      if (w < 0.0) config_error(af, "atom weights must be nonnegative");
      list.push_back({parse_number(atoms[i][0], af + "[0]"), w});
    }
    const double alpha = num("alpha", kPi / 2.0);
    if (!(alpha > 0.0)) config_error(pf + ".alpha", "must be positive");
    return from_measure(TanhMeasure(std::move(list), num("offset", 0.0), alpha));
  }
  if (name == "samples") {
    const json& path = require_key(params, "path", pf);
    if (!path.is_string()) config_error(pf + ".path", "expected a string");
    std::filesystem::path p(path.get<std::string>());
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return read_samples(p.string());
  }
  if (name == "gaussian-mollify") {
    const double w = num("width", 0.0);
    if (!(w > 0.0)) config_error(pf + ".width", "must be positive");
    return gaussian_mollify(parse_function(require_key(params, "base", pf), pf + ".base", base_dir), w);
  }
  if (name == "cosh-mollify") {
    const double eps = num("epsilon", 0.0);
    if (!(eps > 0.0)) config_error(pf + ".epsilon", "must be positive");
    return from_measure(cosh_mollify(parse_function(require_key(params, "base", pf), pf + ".base", base_dir), eps));
  }
  if (name == "reflect") return reflect(parse_function(require_key(params, "base", pf), pf + ".base", base_dir));
  config_error(field + ".name", "unknown function '" + name + "'");
}

MonotoneFunction parse_monotone(const json& desc, const std::string& field) {
  if (!desc.is_object()) config_error(field, "monotone descriptor must be an object");
  const json& name_v = require_key(desc, "name", field);
  if (!name_v.is_string()) config_error(field + ".name", "expected a string");
  const std::string name = name_v.get<std::string>();
  const auto names = monotone_catalog_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    config_error(field + ".name", "unknown monotone function '" + name + "'");
  Params p;
  const json params = desc.value("params", json::object());
  if (!params.is_object()) config_error(field + ".params", "expected an object");
  for (auto it = params.begin(); it != params.end(); ++it)
    p[it.key()] = parse_number(it.value(), field + ".params." + it.key());
  try {
    return monotone_catalog(name, p);
  } catch (const Error& e) {
    config_error(field, e.what());
  }
}

Grid parse_grid(const json& desc, const std::string& field) {
  if (!desc.is_object()) config_error(field, "expected an object {L, N}");
  const double L = number_or(desc, "L", 24.0, field);
  const json& nv = desc.contains("N") ? desc.at("N") : json(2048);
  if (!nv.is_number_integer()) config_error(field + ".N", "expected an integer");
  const long long n = nv.get<long long>();
  if (!(L > 0.0)) config_error(field + ".L", "must be positive");
  if (n < 8 || n > (1 << 15)) config_error(field + ".N", std::to_string(n) + " is outside [8, 32768]");
  if (!is_power_of_two(static_cast<int>(n))) config_error(field + ".N", std::to_string(n) + " is not a power of two");
  return Grid(L, static_cast<int>(n));
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) config_error("config", "top level must be an object");
  if (!doc.contains("schema") || doc.at("schema") != kConfigSchema)
    config_error("schema", std::string("expected \"") + kConfigSchema + "\"");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) config_error("kind", "missing experiment kind");
  ExperimentConfig c;
  c.kind = doc.at("kind").get<std::string>();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    config_error("kind", "unknown experiment kind '" + c.kind + "'");
  if (doc.contains("seed") && !(doc.at("seed").is_number_unsigned() || doc.at("seed").is_number_integer()))
    config_error("seed", "expected a nonnegative integer");
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) config_error("tolerances", "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it)
      if (!(parse_number(it.value(), "tolerances." + it.key()) > 0.0))
        config_error("tolerances." + it.key(), "must be positive");
  }
  if (doc.contains("expect_error")) {
    const json& e = doc.at("expect_error");
    if (!e.is_string()) config_error("expect_error", "expected an error-kind name");
  }
  c.document = doc;
  c.base_dir = base_dir;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "config '" + path + "' is not valid JSON: " + e.what());
  }
  const std::filesystem::path p(path);
  return parse_config(doc, p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace hk
