#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hk/cli.hpp"

namespace hk {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Accuracy:
    case ErrorKind::Truncation:
    case ErrorKind::FitQuality:
    case ErrorKind::Divergence: return 3;
    default: return 2;
  }
}

int exit_code(const json& report) {
  const std::string verdict = report.value("verdict", std::string("error"));
  if (verdict == "pass") return 0;
  if (verdict == "fail") return 1;
  const std::string kind = report.contains("error") ? report.at("error").value("kind", std::string()) : std::string();
  for (int k = 0; k <= static_cast<int>(ErrorKind::SectionAbsent); ++k)
    if (to_string(static_cast<ErrorKind>(k)) == kind) return exit_code_for(static_cast<ErrorKind>(k));
  return 2;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Config, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::Config, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Config, "cannot move report into place at '" + path + "'");
  }
}

namespace {

std::string cell(const json& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) return d != d ? "nan" : (d > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
  }
  if (v.is_null()) return "nan";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string emit_plot_data(const json& report, const std::string& what) {
  static const std::vector<std::string> known = {"eigenvalues", "kernel-slice", "measure-atoms", "convergence"};
  if (std::find(known.begin(), known.end(), what) == known.end())
    fail(ErrorKind::Config, "plot: unknown table '" + what + "' (eigenvalues, kernel-slice, measure-atoms, convergence)");
  if (!report.contains("sections") || !report.at("sections").contains(what)) {
    fail(ErrorKind::SectionAbsent, "report of kind '" + report.value("kind", std::string("?")) + "' has no '" + what +
                                       "' section");
  }
  const json& s = report.at("sections").at(what);
  std::ostringstream out;
  const json& cols = s.at("columns");
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].get<std::string>();
  out << "\n";
  for (const json& row : s.at("rows")) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace hk
