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
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "iml/csv.hpp"
#include "iml/error.hpp"
#include "iml/harness.hpp"
#include "iml/log.hpp"
#include "iml/snapshot.hpp"

namespace iml {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput(fmt::format("cannot write {}", path.string()));
  return out;
}

// Concatenates the channels of several aligned series (truncated to the
// shortest).
TimeSeries merge(std::initializer_list<const TimeSeries*> parts) {
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto* p : parts) n = std::min(n, p->size());
  TimeSeries out((*parts.begin())->sample_rate(), (*parts.begin())->start_time());
  for (const auto* p : parts) {
    for (std::size_t c = 0; c < p->channel_count(); ++c) {
      const auto ch = p->channel(c);
      out.add_channel(p->name(c), {ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(n)});
    }
  }
  return out;
}

json kernel_json(const std::vector<std::vector<KernelParams>>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (const auto& p : row) {
      r.push_back({{"signal_variance", p.signal_variance},
                   {"length_scales", p.length_scales},
                   {"noise_variance", p.noise_variance}});
    }
    out.push_back(r);
  }
  return out;
}

std::unique_ptr<Plant> make_plant(const RunConfig& config) {
  if (config.plant == "sea-arm") {
    SimulationOptions sim = config.simulation;
    sim.seed = config.seed;
    return std::make_unique<SeaArm>(config.arm, sim);
  }
  return std::make_unique<LtiPlant>(
      LtiPlant::from_file(fs::path(config.plant.substr(4))));
}

void write_bode(const fs::path& path, const MimoGp& model,
                std::span<const double> pose, const Plant& plant,
                double sample_rate, double cutoff) {
  constexpr std::size_t kPoints = 200;
  std::vector<double> freqs(kPoints);
  for (std::size_t k = 0; k < kPoints; ++k) {
    freqs[k] = cutoff * static_cast<double>(k) / (kPoints - 1);
  }
  const ModelEstimate est = model.estimate(pose, freqs);
  auto out = open_out(path);
  const std::size_t no = est.n_outputs();
  const std::size_t ni = est.n_inputs();
  const bool has_ref =
      plant.frequency_response(freqs[1], pose, sample_rate).has_value();
  out << "omega";
  for (std::size_t i = 1; i <= no; ++i) {
    for (std::size_t j = 1; j <= ni; ++j) {
      out << fmt::format(",g{0}{1}_re,g{0}{1}_im,g{0}{1}_mag_db,"
                         "g{0}{1}_phase_deg,g{0}{1}_var",
                         i, j);
      if (has_ref) out << fmt::format(",ref{0}{1}_mag_db,ref{0}{1}_phase_deg", i, j);
    }
  }
  out << '\n';
  for (std::size_t k = 0; k < kPoints; ++k) {
    out << fmt::format("{}", freqs[k]);
    std::optional<Eigen::MatrixXcd> ref;
    if (has_ref) ref = plant.frequency_response(freqs[k], pose, sample_rate);
    for (std::size_t i = 0; i < no; ++i) {
      for (std::size_t j = 0; j < ni; ++j) {
        const Complex g = est.mean[k](i, j);
        out << fmt::format(",{},{},{},{},{}", g.real(), g.imag(),
                           20.0 * std::log10(std::abs(g)),
                           std::arg(g) * 180.0 / std::numbers::pi,
                           est.variance[k](i, j));
        if (ref) {
          const Complex r = (*ref)(i, j);
          out << fmt::format(",{},{}", 20.0 * std::log10(std::abs(r)),
                             std::arg(r) * 180.0 / std::numbers::pi);
        }
      }
    }
    out << '\n';
  }
}

}  // namespace

ExperimentOutcome run_experiment(const RunConfig& config,
                                 const std::optional<std::string>& source) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const fs::path dir = config.output_dir;
  fs::create_directories(dir / "iterations");
  fs::create_directories(dir / "gains");
  fs::create_directories(dir / "models");
  {
    auto out = open_out(dir / "config.ini");
    print_config(config, out);
  }
  if (source) open_out(dir / "config_source.ini") << *source;

  const TimeSeries y_d = reference_trajectory(config);
  auto plant = make_plant(config);
  if (y_d.channel_count() != plant->n_outputs()) {
    throw InvalidInput(fmt::format(
        "trajectory has {} channels but the plant has {} outputs",
        y_d.channel_count(), plant->n_outputs()));
  }
  const double fs_rate = y_d.sample_rate();
  LearningConfig learning = config.learning;
  learning.gp.fit.seed = config.seed;
  const TimeSeries seed_input = generate_seed_trajectory(
      y_d, {learning.param_quantum, learning.window_seconds,
            config.seed_settle_seconds});
  write_csv(dir / "reference.csv", y_d);

  std::ofstream convergence = open_out(dir / "convergence.csv");
  convergence << "iteration";
  for (std::size_t i = 1; i <= y_d.channel_count(); ++i) {
    convergence << ",max_e" << i;
  }
  for (std::size_t i = 1; i <= y_d.channel_count(); ++i) {
    convergence << ",rms_e" << i;
  }
  convergence << ",feasible_fraction,mean_rho,training_points\n";
  convergence.flush();

  ExperimentOutcome outcome;
  outcome.directory = dir;

  LearningHooks hooks;
  const Plant* plant_ptr = plant.get();
  hooks.reference = [plant_ptr, fs_rate](double omega,
                                         std::span<const double> params) {
    return plant_ptr->frequency_response(omega, params, fs_rate);
  };
  hooks.on_seed = [&](const IterationRecord& rec) {
    write_csv(dir / "seed.csv", merge({&rec.u, &rec.y}));
  };
  hooks.on_iteration = [&](IterationRecord& rec, const MimoGp* model) {
    const std::string tag = fmt::format("{:02d}", rec.index);
    write_csv(dir / "iterations" / fmt::format("iter_{}.csv", tag),
              merge({&rec.u, &rec.y, &rec.e}));
    if (model != nullptr && model->trained()) {
      rec.model_snapshot_ref = fmt::format("models/model_{}.json", tag);
      save_snapshot(*model, dir / rec.model_snapshot_ref);
    }
    {
      auto out = open_out(dir / "gains" / fmt::format("gains_{}.csv", tag));
      write_gain_diagnostics(out, rec.gains);
    }
    std::size_t feasible = 0;
    for (const auto& g : rec.gains) feasible += g.feasible ? 1 : 0;
    json summary = {{"iteration", rec.index},
                    {"max_abs_error", rec.max_abs_error},
                    {"rms_error", rec.rms_error},
                    {"feasible_fraction", rec.feasible_fraction},
                    {"feasible_count", feasible},
                    {"gain_count", rec.gains.size()},
                    {"mean_rho", rec.mean_rho},
                    {"training_points", rec.training_points},
                    {"hyperparameters", kernel_json(rec.hyperparameters)},
                    {"model_snapshot", rec.model_snapshot_ref},
                    {"saturated", rec.saturated},
                    {"fault", rec.fault},
                    {"message", rec.message}};
    open_out(dir / "iterations" / fmt::format("iter_{}.json", tag))
        << summary.dump(2) << '\n';
    convergence << rec.index;
    for (double v : rec.max_abs_error) convergence << fmt::format(",{}", v);
    for (double v : rec.rms_error) convergence << fmt::format(",{}", v);
    convergence << fmt::format(",{},{},{}\n", rec.feasible_fraction,
                               rec.mean_rho, rec.training_points);
    convergence.flush();
    logger()->info("iteration {}: max error {}", rec.index, rec.max_error());
  };

  const LearningResult result =
      run_learning(*plant, y_d, learning, &seed_input, nullptr, hooks);

  for (const auto& rec : result.iterations) {
    outcome.max_abs_error.push_back(rec.max_abs_error);
    outcome.rms_error.push_back(rec.rms_error);
  }
  outcome.converged = result.converged;
  outcome.converged_at = result.converged_at;
  outcome.exit_code = result.faulted ? kExitPlantFault : kExitOk;
  outcome.message = result.fault_message;

  const bool two_params =
      learning.use_parameters && result.model.location_dim() == 3;
  if (!result.faulted && two_params && result.model.trained()) {
    const double poses[2][2] = {{std::numbers::pi / 2.0, 0.0},
                                {0.0, std::numbers::pi / 2.0}};
    for (int p = 0; p < 2; ++p) {
      write_bode(dir / fmt::format("bode_pose_{}.csv", p + 1), result.model,
                 poses[p], *plant, fs_rate, learning.cutoff(fs_rate));
    }
  }

  json g0 = json::array();
  for (Eigen::Index i = 0; i < result.dc_gain.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < result.dc_gain.cols(); ++j) {
      row.push_back(result.dc_gain(i, j));
    }
    g0.push_back(row);
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  json status = {
      {"completed", !result.faulted},
      {"faulted", result.faulted},
      {"message", result.fault_message},
      {"iterations", result.iterations.size()},
      {"converged", result.converged},
      {"converged_at", result.converged_at},
      {"dc_gain", g0},
      {"seed_saturated", result.seed ? result.seed->saturated : false},
      {"seconds", seconds}};
  open_out(dir / "status.json") << status.dump(2) << '\n';
  return outcome;
}

}  // namespace iml
