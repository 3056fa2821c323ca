#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "hk/cli.hpp"

namespace {

int report_error(const hk::Error& e) {
  std::cerr << "hklab: " << hk::to_string(e.kind()) << " error: " << e.what() << "\n";
  return hk::exit_code_for(e.kind());
}

int run_kind(const std::string& kind, const std::string& config_path, const std::string& out,
             std::optional<std::uint64_t> seed) {
  hk::ExperimentConfig cfg = hk::load_config(config_path);
  if (cfg.kind != kind)
    hk::fail(hk::ErrorKind::Config, "kind: config describes '" + cfg.kind + "' but subcommand is '" + kind + "'");
  if (seed) cfg.document["seed"] = *seed;
  const hk::json report = hk::run(cfg);
  const std::string text = hk::dump_report(report);
  if (out.empty()) std::cout << text;
  else hk::write_file_atomic(out, text);

  const std::string verdict = report.at("verdict").get<std::string>();
  if (verdict == "error") {
    std::cerr << "hklab: " << report.at("error").at("kind").get<std::string>()
              << " error: " << report.at("error").at("message").get<std::string>() << "\n";
  } else if (verdict == "fail") {
    for (const auto& c : report.at("checks"))
      if (c.at("verdict") == "fail") std::cerr << "hklab: check failed: " << c.at("name").get<std::string>() << "\n";
  }
  return hk::exit_code(report);
}

int plot(const std::string& report_path, const std::string& what, const std::string& out) {
  std::ifstream in(report_path);
  if (!in) hk::fail(hk::ErrorKind::Config, "cannot open report '" + report_path + "'");
  hk::json report;
  try {
    report = hk::json::parse(in);
  } catch (const hk::json::exception& e) {
    hk::fail(hk::ErrorKind::Config, "report '" + report_path + "' is not valid JSON: " + e.what());
  }
  const std::string table = hk::emit_plot_data(report, what);
  if (out.empty()) std::cout << table;
  else hk::write_file_atomic(out, table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the commutator i[f(P), g(Q)]"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hk::kArtifactVersion);

  struct KindArgs {
    std::string config, out;
    std::optional<std::uint64_t> seed;
  };
  std::vector<std::pair<CLI::App*, std::shared_ptr<KindArgs>>> kinds;
  for (const std::string& kind : hk::experiment_kinds()) {
    auto args = std::make_shared<KindArgs>();
    CLI::App* sub = app.add_subcommand(kind, "Run a " + kind + " experiment");
    sub->add_option("--config", args->config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args->out, "Report path (stdout if omitted)");
    sub->add_option("--seed", args->seed, "Override the config seed");
    kinds.emplace_back(sub, args);
  }

  std::string report_path, what, plot_out;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Write a CSV table from a report section");
  plot_cmd->add_option("--report", report_path, "Report (JSON)")->required();
  plot_cmd->add_option("--what", what, "eigenvalues | kernel-slice | measure-atoms | convergence")->required();
  plot_cmd->add_option("--out", plot_out, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plot_cmd->parsed()) return plot(report_path, what, plot_out);
    for (auto& [sub, args] : kinds)
      if (sub->parsed()) return run_kind(sub->get_name(), args->config, args->out, args->seed);
  } catch (const hk::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "hklab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
