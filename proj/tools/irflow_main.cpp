#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irflow/cli.hpp"

using namespace irflow;

int main(int argc, char** argv) {
  CLI::App app{"Multiscale ground-state construction for the spin-boson "
               "model: cutoff cascades, gap and projection bounds, and the "
               "exactly solvable diagonal contrast."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string sweep_param;
  std::string sweep_values;
  bool allow_out_of_regime = false;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    auto* out = sub->add_option("--out", out_dir, "output directory");
    if (out_required) out->required();
    sub->add_flag("--allow-out-of-regime", allow_out_of_regime,
                  "accept parameters outside the smallness hypotheses");
  };

  CLI::App* run = app.add_subcommand("run", "run the cascade, write tables");
  add_common(run, true);
  CLI::App* verify =
      app.add_subcommand("verify", "run the cascade and the bound ledger");
  add_common(verify, false);
  CLI::App* sweep =
      app.add_subcommand("sweep", "run one cascade per parameter value");
  add_common(sweep, true);
  sweep->add_option("--param", sweep_param, "model parameter to sweep");
  sweep->add_option("--values", sweep_values, "comma-separated values");

  CLI11_PARSE(app, argc, argv);

  cli::RunConfig config;
  try {
    config = cli::load_config(config_path, allow_out_of_regime);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return cli::kConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kIoError;
  }
  if (!out_dir.empty()) config.output_dir = out_dir;

  cli::Verb verb = cli::Verb::Run;
  if (verify->parsed()) verb = cli::Verb::Verify;
  if (sweep->parsed()) {
    verb = cli::Verb::Sweep;
    if (!sweep_param.empty() || !sweep_values.empty()) {
      cli::SweepSpec spec;
      spec.param = sweep_param;
      std::size_t pos = 0;
      try {
        while (pos < sweep_values.size()) {
          std::size_t used = 0;
          spec.values.push_back(std::stod(sweep_values.substr(pos), &used));
          pos += used;
          if (pos < sweep_values.size() && sweep_values[pos] == ',') ++pos;
        }
      } catch (const std::exception&) {
        std::cerr << "config error: --values must be a comma-separated "
                     "numeric list\n";
        return cli::kConfigError;
      }
      if (spec.param.empty() || spec.values.empty()) {
        std::cerr << "config error: sweep needs --param and --values\n";
        return cli::kConfigError;
      }
      config.sweep = spec;
    }
  }

  return cli::execute(config, verb, std::cout);
}
