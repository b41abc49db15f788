#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "irflow/cli.hpp"
#include "irflow/report.hpp"

using namespace irflow;
namespace fs = std::filesystem;

namespace {

const char* kBaselineConfig = R"({
  "g": 0.001,
  "gamma": 0.1,
  "kappa": 0.5,
  "f_profile": "unit",
  "J": 1,
  "N_max": 3,
  "N_scales": 4,
  "tol_eig": 1e-11,
  "mode": "offdiagonal",
  "riesz": {"radius_factor": 0.125, "nodes": 64}
})";

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir =
      fs::temp_directory_path() / ("irflow_" + tag + "_" +
                                   std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("baseline config parses with every field honored") {
  const cli::RunConfig config = cli::parse_config(kBaselineConfig);
  CHECK(config.model.g == 0.001);
  CHECK(config.model.gamma == 0.1);
  CHECK(config.model.kappa == 0.5);
  CHECK(config.model.J == 1);
  CHECK(config.model.N_max == 3);
  CHECK(config.model.N_scales == 4);
  CHECK(config.model.tol_eig == 1e-11);
  CHECK(config.model.riesz.nodes == 64);
  CHECK(config.mode == CouplingMode::OffDiagonal);
  CHECK(config.emit_csv);
  CHECK(config.emit_json);
}

TEST_CASE("unknown keys are rejected at every nesting level") {
  CHECK_THROWS_AS(cli::parse_config(R"({"gg": 1})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"riesz": {"radius": 0.1}})"),
                  ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"sweep": {"param": "g"}})"),
                  ConfigError);
  CHECK_THROWS_AS(cli::parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"J": 1.5})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"mode": "sideways"})"), ConfigError);
}

TEST_CASE("out-of-regime parameters are refused, citing the hypothesis") {
  const char* bad = R"({"g": 0.0031, "gamma": 0.1})";  // g = gamma/32
  CHECK_THROWS_AS(cli::parse_config(bad), ConfigError);
  try {
    cli::parse_config(bad);
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("g < 1/64 gamma") !=
          std::string::npos);
  }
  CHECK_NOTHROW(cli::parse_config(bad, /*allow_out_of_regime=*/true));
}

TEST_CASE("profile tables and emit subsets parse") {
  const cli::RunConfig config = cli::parse_config(
      R"({"f_profile": [[0.0, 1.0], [0.5, 0.25]], "emit": ["csv"]})");
  CHECK(config.model.f.name() == "table");
  CHECK(config.model.f(0.25) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(config.emit_csv);
  CHECK_FALSE(config.emit_json);
  CHECK_THROWS_AS(cli::parse_config(R"({"emit": ["pdf"]})"), ConfigError);
}

TEST_CASE("run writes the cascade table and the structured report") {
  cli::RunConfig config = cli::parse_config(kBaselineConfig);
  const fs::path dir = fresh_dir("run");
  config.output_dir = dir.string();

  std::ostringstream log;
  const int code = cli::execute(config, cli::Verb::Run, log);
  CHECK(code == cli::kOk);
  REQUIRE(fs::exists(dir / "cascade.csv"));
  REQUIRE(fs::exists(dir / "report.json"));

  const std::string csv = slurp(dir / "cascade.csv");
  std::size_t rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 6);  // header + records for n = 0..4

  const std::string json = slurp(dir / "report.json");
  CHECK(json.find("\"e_gs\"") != std::string::npos);
  CHECK(json.find("\"truncation\"") != std::string::npos);
  CHECK(json.find("\"checks\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("verify passes on the baseline and prints the ledger summary") {
  cli::RunConfig config = cli::parse_config(kBaselineConfig);
  std::ostringstream log;
  const int code = cli::execute(config, cli::Verb::Verify, log);
  CHECK(code == cli::kOk);
  CHECK(log.str().find("0 failed") != std::string::npos);
  CHECK(log.str().find("E_gs") != std::string::npos);
}

TEST_CASE("sweep writes one report per value plus the summary table") {
  cli::RunConfig config = cli::parse_config(kBaselineConfig);
  const fs::path dir = fresh_dir("sweep");
  config.output_dir = dir.string();
  config.sweep = cli::SweepSpec{"g", {0.1 / 256.0, 0.1 / 128.0, 0.1 / 65.0}};

  std::ostringstream log;
  const int code = cli::execute(config, cli::Verb::Sweep, log);
  CHECK(code == cli::kOk);
  REQUIRE(fs::exists(dir / "summary.csv"));
  const std::string summary = slurp(dir / "summary.csv");
  std::size_t rows = 0;
  for (char ch : summary)
    if (ch == '\n') ++rows;
  CHECK(rows == 4);  // header + one line per swept value
  CHECK(summary.rfind("g,", 0) == 0);

  std::size_t dirs = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) ++dirs;
  CHECK(dirs == 3);
  fs::remove_all(dir);
}

TEST_CASE("sweeping an unknown parameter exits with the config code") {
  cli::RunConfig config = cli::parse_config(kBaselineConfig);
  config.output_dir = fresh_dir("badsweep").string();
  config.sweep = cli::SweepSpec{"zeta", {1.0}};
  std::ostringstream log;
  CHECK(cli::execute(config, cli::Verb::Sweep, log) == cli::kConfigError);
  CHECK(log.str().find("zeta") != std::string::npos);
}

TEST_CASE("worker cap respects the environment override") {
  ::setenv("IRFLOW_THREADS", "2", 1);
  CHECK(cli::sweep_workers(8) == 2);
  CHECK(cli::sweep_workers(1) == 1);
  ::unsetenv("IRFLOW_THREADS");
  CHECK(cli::sweep_workers(1) == 1);
}

TEST_CASE("end-to-end binary run, verify, and config rejection") {
  const char* bin = std::getenv("IRFLOW_BIN");
  if (!std::getenv("IRFLOW_CLI_E2E") || !bin) {
    MESSAGE("IRFLOW_BIN not set; exercising the library entry point only");
    return;
  }
  const fs::path dir = fresh_dir("e2e");
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << kBaselineConfig;
  }

  const auto shell = [&](const std::string& cmd) {
    return std::system((std::string(bin) + " " + cmd + " > " +
                        (dir / "log.txt").string() + " 2>&1")
                           .c_str());
  };

  int status = shell("run --config " + cfg.string() + " --out " +
                     (dir / "out").string());
  CHECK(WEXITSTATUS(status) == cli::kOk);
  CHECK(fs::exists(dir / "out" / "cascade.csv"));
  CHECK(fs::exists(dir / "out" / "report.json"));

  status = shell("verify --config " + cfg.string());
  CHECK(WEXITSTATUS(status) == cli::kOk);

  // g = gamma/32 violates the hypothesis: config error, exit 4
  const fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << R"({"g": 0.0031, "gamma": 0.1})";
  }
  status = shell("verify --config " + bad.string());
  CHECK(WEXITSTATUS(status) == cli::kConfigError);

  status = shell("sweep --config " + cfg.string() + " --out " +
                 (dir / "sweep").string() + " --param g --values " +
                 "0.00039,0.00078");
  CHECK(WEXITSTATUS(status) == cli::kOk);
  CHECK(fs::exists(dir / "sweep" / "summary.csv"));
  fs::remove_all(dir);
}
