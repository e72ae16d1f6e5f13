// apex: batch runner for adiabatic product expansion scenarios.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "apex/operator_core.hpp"
#include "runner/config.hpp"
#include "runner/runner.hpp"

namespace ar = apex::runner;

namespace {

ar::ScenarioConfig load(const std::string& path, double oracle_tol) {
  auto config = ar::load_config(path);
  if (oracle_tol > 0.0) {
    config.oracle_tol = oracle_tol;
    ar::validate(config);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic product expansion runner"};
  app.require_subcommand(1);

  std::string out = ".";
  double oracle_tol = 0.0;
  bool seedless = false;
  app.add_option("--out", out, "Directory for report CSVs")->capture_default_str();
  app.add_option("--oracle-tol", oracle_tol, "Override the oracle tolerance of the config");
  app.add_flag("--seedless", seedless, "Fail unless the pipeline is free of random numbers");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one scenario and write its reports");
  run->add_option("config", config_path, "Scenario YAML file")->required();
  run->fallthrough();

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over a parameter list");
  sweep->add_option("config", config_path, "Scenario YAML file")->required();
  sweep->add_option("--param", param, "omega_p, b, points or N")->required();
  sweep->add_option("--values", values, "Comma separated values")->required();
  sweep->fallthrough();

  auto* profile = app.add_subcommand("profile", "Write the scenario field as t,r,theta,phi CSV");
  profile->add_option("config", config_path, "Scenario YAML file")->required();
  profile->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::fprintf(stderr, "apex: error code=2 kind=usage message=\"%s\"\n", msg.c_str());
    return ar::exit_code::config;
  }

  try {
    if (seedless && apex::kUsesRandomNumbers) {
      throw apex::Error("--seedless: a random number generator is linked into the pipeline");
    }
    if (oracle_tol != 0.0 && !(oracle_tol >= 1e-12 && oracle_tol <= 1e-3)) {
      throw ar::ConfigError("--oracle-tol", "must lie in [1e-12, 1e-3]");
    }
    const auto config = load(config_path, oracle_tol);
    if (*run) {
      const auto outcome = ar::run_scenario(config);
      ar::write_reports(outcome, out);
      if (outcome.certificate && !outcome.certificate->granted) {
        std::fprintf(stderr,
                     "apex: error code=5 kind=certificate message=\"certificate not granted: "
                     "residual %.6g (bound %.6g), max distance %.6g (tolerance %.6g)\"\n",
                     outcome.certificate->residual, outcome.certificate->residual_bound,
                     outcome.certificate->max_distance, outcome.certificate->tolerance);
        return ar::exit_code::certificate;
      }
    } else if (*sweep) {
      const auto table =
          ar::sweep(config, ar::parse_sweep_param(param), ar::parse_values(values));
      ar::write_atomic(std::filesystem::path(out) / "sweep.csv", ar::to_csv(table));
    } else if (*profile) {
      const auto field = ar::prepare_field(config);
      std::ostringstream csv;
      apex::write_field_profile(csv, field.field, field.grid);
      ar::write_atomic(std::filesystem::path(out) / "field.csv", csv.str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", ar::diagnostic(e).c_str());
    return ar::exit_code_for(e);
  }
  return ar::exit_code::ok;
}
