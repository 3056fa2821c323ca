#pragma once

// Declarative experiment runner: JSON configs in, JSON reports and CSV tables out.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hk/monotone.hpp"

namespace hk {

using json = nlohmann::json;

inline constexpr const char* kConfigSchema = "hklab.config/1";
inline constexpr const char* kReportSchema = "hklab.report/1";
inline constexpr const char* kArtifactVersion = "1.0.0";

const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
  std::string kind;
  json document;          // full config, echoed into the report
  std::string base_dir;   // resolves relative sample-file paths
};

/// Parses and validates; errors are Config errors naming the offending field.
ExperimentConfig parse_config(const json& doc, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Numeric field: JSON number or an arithmetic string such as "pi/2" or "-3*pi/4".
double parse_number(const json& v, const std::string& field);
double eval_expression(const std::string& text);

RealFunction parse_function(const json& desc, const std::string& field, const std::string& base_dir);
MonotoneFunction parse_monotone(const json& desc, const std::string& field);
Grid parse_grid(const json& desc, const std::string& field);

/// Runs the experiment; module errors are captured in the report unless `rethrow`.
json run(const ExperimentConfig& config);

/// 0 pass, 1 failed check, 2 usage/config or module error, 3 numerical accuracy error.
int exit_code(const json& report);
int exit_code_for(ErrorKind kind);

/// Byte-stable serialization; wall_clock_seconds is the only varying field.
std::string dump_report(const json& report);
void write_file_atomic(const std::string& path, const std::string& contents);

/// CSV for eigenvalues | kernel-slice | measure-atoms | convergence.
std::string emit_plot_data(const json& report, const std::string& what);

}  // namespace hk
