// Copyright 2026 The iml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command line front end: run, report, verify-lemmas, sim.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "iml/csv.hpp"
#include "iml/error.hpp"
#include "iml/harness.hpp"
#include "iml/log.hpp"
#include "iml/plant.hpp"
#include "iml/verification.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::string trajectory;
  std::string plant;
  bool print_config = false;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw iml::InvalidInput("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Defaults, then the config file, then command line overrides.
iml::RunConfig resolve(const CommonOptions& o, std::optional<std::string>* source) {
  iml::RunConfig config;
  if (!o.config_path.empty()) {
    std::string text = read_text(o.config_path);
    config = iml::parse_config(text);
    if (source != nullptr) *source = std::move(text);
  }
  if (!o.out.empty()) config.output_dir = o.out;
  if (o.seed) config.seed = *o.seed;
  if (o.iterations) config.learning.max_iterations = *o.iterations;
  if (!o.trajectory.empty()) config.trajectory = o.trajectory;
  if (!o.plant.empty()) config.plant = o.plant;
  config.validate();
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI configuration file");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--iterations", o.iterations, "Learning iterations");
  cmd->add_option("--trajectory", o.trajectory, "slow | fast | custom:<path>");
  cmd->add_option("--plant", o.plant, "sea-arm | lti:<path>");
  cmd->add_flag("--print-config", o.print_config,
                "Print the resolved configuration and exit");
}

int run_command(const CommonOptions& o) {
  std::optional<std::string> source;
  const iml::RunConfig config = resolve(o, &source);
  if (o.print_config) {
    iml::print_config(config, std::cout);
    return iml::kExitOk;
  }
  const auto outcome = iml::run_experiment(config, source);
  std::cout << iml::report(outcome.directory);
  if (outcome.exit_code != iml::kExitOk) {
    std::cerr << "plant fault: " << outcome.message << '\n';
  }
  return outcome.exit_code;
}

int sim_command(const CommonOptions& o, const std::string& input) {
  const iml::RunConfig config = resolve(o, nullptr);
  if (o.print_config) {
    iml::print_config(config, std::cout);
    return iml::kExitOk;
  }
  if (input.empty()) throw iml::InvalidInput("sim: --input is required");
  const iml::TimeSeries u = iml::read_csv(fs::path(input));
  std::unique_ptr<iml::Plant> plant;
  if (config.plant == "sea-arm") {
    iml::SimulationOptions sim = config.simulation;
    sim.seed = config.seed;
    plant = std::make_unique<iml::SeaArm>(config.arm, sim);
  } else {
    plant = std::make_unique<iml::LtiPlant>(
        iml::LtiPlant::from_file(config.plant.substr(4)));
  }
  const iml::PlantRun run = plant->execute(u);
  if (o.out.empty()) {
    iml::write_csv(std::cout, run.output);
  } else {
    iml::write_csv(fs::path(o.out), run.output);
  }
  if (run.fault) {
    std::cerr << "plant fault: " << run.message << '\n';
    return iml::kExitPlantFault;
  }
  if (run.saturated) std::cerr << "warning: " << run.message << '\n';
  return iml::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative learning control with complex-valued GP models"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Seed, learn and write a run directory");
  add_common(run, run_opts);

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Summarize a run directory");
  rep->add_option("dir", report_dir, "Run directory")->required();

  std::uint64_t verify_seed = 1;
  std::size_t trials = 1000;
  auto* verify =
      app.add_subcommand("verify-lemmas", "Monte-Carlo checks of the gain bounds");
  verify->add_option("--seed", verify_seed, "Master seed");
  verify->add_option("--trials", trials, "Trials per suite");

  CommonOptions sim_opts;
  std::string sim_input;
  auto* sim = app.add_subcommand("sim", "Execute the plant on an input CSV");
  add_common(sim, sim_opts);
  sim->add_option("--input", sim_input, "Input CSV (t,u1,u2,...)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? iml::kExitOk : iml::kExitConfigError;
  }
  if (verbose) iml::logger()->set_level(spdlog::level::info);

  try {
    if (*run) return run_command(run_opts);
    if (*rep) {
      std::cout << iml::report(report_dir);
      return iml::kExitOk;
    }
    if (*verify) {
      const auto suites = iml::verify_lemmas(verify_seed, trials);
      iml::print_suites(suites, std::cout);
      for (const auto& s : suites) {
        if (!s.passed()) return 1;
      }
      return iml::kExitOk;
    }
    if (*sim) return sim_command(sim_opts, sim_input);
  } catch (const iml::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return iml::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return iml::kExitOk;
}
