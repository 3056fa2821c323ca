#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "hk/cli.hpp"

using namespace hk;

namespace {

json base_config(const std::string& kind) {
  return {{"schema", kConfigSchema}, {"kind", kind}};
}

std::string config_error_message(const json& doc) {
  const json r = run(parse_config(doc));
  return r.contains("error") ? r.at("error").at("message").get<std::string>() : std::string();
}

json without_clock(json r) {
  r.erase("wall_clock_seconds");
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("expressions") {
    CHECK(eval_expression("pi/2") == doctest::Approx(kPi / 2.0));
    CHECK(eval_expression("-(pi-2)/(2*pi)") == doctest::Approx(-(kPi - 2.0) / (2.0 * kPi)));
    CHECK(eval_expression("1e-3 * 4") == doctest::Approx(4e-3));
    CHECK_THROWS_AS(parse_number(json("2 +"), "x"), Error);
    CHECK_THROWS_AS(parse_number(json(true), "x"), Error);
  }

  TEST_CASE("config validation names the field") {
    auto message = [](const json& doc) {
      try {
        parse_config(doc);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message(json{{"kind", "rank3"}}).find("schema") != std::string::npos);
    CHECK(message(base_config("rank9")).find("kind") != std::string::npos);
    json t = base_config("rank3");
    t["tolerances"] = {{"trace", -1}};
    CHECK(message(t).find("tolerances.trace") != std::string::npos);
    json s = base_config("rank3");
    s["seed"] = "seven";
    CHECK(message(s).find("seed") != std::string::npos);
  }

  TEST_CASE("grid validation") {
    try {
      parse_grid({{"L", 24}, {"N", 1000}}, "grid");
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      CHECK(std::string(e.what()).find("grid.N") != std::string::npos);
    }
    CHECK(parse_grid(json::object(), "grid").size() == 2048);
    CHECK_THROWS_AS(parse_grid({{"L", 0}}, "grid"), Error);
    json doc = base_config("build-kernel");
    doc["f"] = {{"name", "tanh-affine"}};
    doc["g"] = {{"name", "tanh-affine"}};
    doc["grid"] = {{"N", 1000}};
    const json r = run(parse_config(doc));
    CHECK(r.at("verdict") == "error");
    CHECK(r.at("error").at("kind") == "config");
    CHECK(exit_code(r) == 2);
    CHECK(config_error_message(doc).find("grid.N") != std::string::npos);
  }

  TEST_CASE("function descriptors") {
    const RealFunction f = parse_function({{"name", "tanh-affine"}, {"params", {{"c", 2}, {"a", "pi/2"}}}}, "f", ".");
    CHECK(f(1.0) == doctest::Approx(2.0 * std::tanh(kPi / 2.0)));
    const RealFunction flat = parse_function({{"name", "arctan-affine"}, {"b", 0.5}}, "f", ".");
    CHECK(flat(2.0) == doctest::Approx(std::atan(1.0)));
    const RealFunction m = parse_function(
        {{"name", "tanh-measure"}, {"params", {{"atoms", {{-1, 0.5}, {1, 0.5}}}, {"alpha", "pi/2"}}}}, "f", ".");
    CHECK(m(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    const RealFunction s = parse_function({{"name", "samples"}, {"params", {{"path", "tanh-coarse.txt"}}}}, "f",
                                          HKLAB_TEST_DATA);
    CHECK(s(1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-9));
    try {
      parse_function({{"name", "tanh-measure"}, {"params", {{"atoms", {{0, -1}}}}}}, "f", ".");
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("f.params.atoms[0]") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_function({{"name", "gamma"}}, "g", "."), Error);
    CHECK_THROWS_AS(parse_monotone({{"name", "cube"}}, "F"), Error);
  }

  TEST_CASE("report structure, verdict conjunction and exit codes") {
    json doc = base_config("spectrum");
    doc["f"] = {{"name", "tanh-affine"}, {"params", {{"a", "pi/2"}}}};
    doc["g"] = {{"name", "tanh-affine"}};
    doc["grid"] = {{"L", 24}, {"N", 256}};
    doc["expect"] = {{"rank", 1}, {"positive", true}};
    const json r = run(parse_config(doc));
    CHECK(r.at("schema") == kReportSchema);
    CHECK(r.at("version") == kArtifactVersion);
    CHECK(r.at("config") == doc);
    CHECK(r.at("verdict") == "pass");
    CHECK(exit_code(r) == 0);
    for (const json& c : r.at("checks"))
      for (const char* key : {"name", "lhs", "rhs", "error", "tolerance", "verdict"}) CHECK(c.contains(key));

    doc["expect"]["rank"] = 2;
    const json bad = run(parse_config(doc));
    CHECK(bad.at("verdict") == "fail");
    CHECK(exit_code(bad) == 1);
    int failed = 0;
    for (const json& c : bad.at("checks")) failed += c.at("verdict") == "fail";
    CHECK(failed == 1);

    CHECK(exit_code_for(ErrorKind::FitQuality) == 3);
    CHECK(exit_code_for(ErrorKind::Truncation) == 3);
    CHECK(exit_code_for(ErrorKind::Config) == 2);
  }

  TEST_CASE("expected errors") {
    json doc = base_config("rank1");
    doc["c2"] = -1;
    doc["grid"] = {{"N", 64}};
    doc["expect_error"] = "sign-constraint";
    CHECK(run(parse_config(doc)).at("verdict") == "pass");
    doc["expect_error"] = "divergence";
    const json r = run(parse_config(doc));
    CHECK(r.at("verdict") == "error");
    CHECK(r.at("error").at("kind") == "sign-constraint");
    doc.erase("c2");
    doc["grid"] = {{"N", 128}, {"L", 16}};
    doc["reconstruct"] = false;
    CHECK(run(parse_config(doc)).at("verdict") == "fail");
  }

  TEST_CASE("determinism") {
    json doc = base_config("loewner-test");
    doc["F"] = {{"name", "log"}, {"params", {{"c", 1}}}};
    doc["sizes"] = {2, 3};
    doc["trials"] = 300;
    doc["seed"] = 99;
    const ExperimentConfig c = parse_config(doc);
    CHECK(dump_report(without_clock(run(c))) == dump_report(without_clock(run(c))));
  }

  TEST_CASE("plot tables") {
    json doc = base_config("fit-measure");
    doc["f"] = {{"name", "sum"},
                {"params", {{"terms", {{{"name", "tanh-affine"}, {"params", {{"c", 0.5}, {"t0", -1}}}},
                                       {{"name", "tanh-affine"}, {"params", {{"c", 0.5}, {"t0", 1}}}}}}}}};
    const json r = run(parse_config(doc));
    const std::string csv = emit_plot_data(r, "measure-atoms");
    CHECK(csv.rfind("location,weight\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    try {
      emit_plot_data(r, "eigenvalues");
      FAIL("expected section-absent");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SectionAbsent);
    }
    CHECK_THROWS_AS(emit_plot_data(r, "spectrum"), Error);
  }

  TEST_CASE("atomic write") {
    const auto dir = std::filesystem::temp_directory_path() / "hklab-cli-test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "report.json").string();
    write_file_atomic(path, "{}\n");
    write_file_atomic(path, "{\"a\": 1}\n");
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "{\"a\": 1}\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("every shipped config parses") {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(HKLAB_CORPUS_DIR)) {
      if (e.path().extension() != ".json") continue;
      const ExperimentConfig c = load_config(e.path().string());
      CHECK(c.document.contains("description"));
      ++n;
    }
    CHECK(n >= 40);
  }
}
