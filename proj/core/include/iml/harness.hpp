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
#ifndef IML_HARNESS_HPP_
#define IML_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "iml/ilc.hpp"
#include "iml/plant.hpp"
#include "iml/signals.hpp"

namespace iml {

// ---------------------------------------------------------------------------
// Trajectories

enum class TrajectoryKind { slow_full_range, fast_short_range, custom };

// Sinusoidal-acceleration move of each joint from start by amplitude over
// duration, preceded by lead_in and followed by tail seconds of hold.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::slow_full_range;
  std::vector<double> start{0.0, 0.0};
  std::vector<double> amplitude{std::numbers::pi, std::numbers::pi};
  double duration = 10.0;
  double lead_in = 0.5;
  double tail = 2.0;

  static TrajectorySpec slow();
  static TrajectorySpec fast();
};

struct ProfilePoint {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

// a(t) = A sin(2 pi t / T) integrated twice from rest, A chosen so the
// displacement at T equals amplitude. Clamped outside [0, T].
ProfilePoint sinusoidal_profile(double t, double amplitude, double duration);

// Channels y1..yN. Throws InvalidInput for a nonpositive duration.
TimeSeries generate_trajectory(const TrajectorySpec& spec, double sample_rate);

struct SeedOptions {
  double quantum = std::numbers::pi / 10.0;
  double window_seconds = 2.0;
  double settle_seconds = 1.0;
};

// Staircase through the quantized levels each joint of y_d visits. Starting
// at the quantized initial pose, joints step one at a time (joint 1, then
// joint 2, ...) to their next level; every pose, the first included, is held
// for window_seconds + settle_seconds.
TimeSeries generate_seed_trajectory(const TimeSeries& y_d,
                                    const SeedOptions& options = {});

// ---------------------------------------------------------------------------
// Configuration

enum class PlantKind { sea_arm, lti };

struct RunConfig {
  std::string trajectory = "slow";  // slow | fast | custom:<path>
  std::string plant = "sea-arm";    // sea-arm | lti:<path>
  std::filesystem::path output_dir = "run";
  std::uint64_t seed = 1;
  double sample_rate = 100.0;
  TrajectorySpec slow = TrajectorySpec::slow();
  TrajectorySpec fast = TrajectorySpec::fast();
  double seed_settle_seconds = 1.0;
  ArmParams arm;
  SimulationOptions simulation;
  LearningConfig learning;

  // Throws InvalidInput on inconsistent values.
  void validate() const;
};

// Flat INI document with sections; keys absent from the text keep their
// defaults. Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
void print_config(const RunConfig& config, std::ostream& out);

// Reference trajectory selected by config.trajectory.
TimeSeries reference_trajectory(const RunConfig& config);

// ---------------------------------------------------------------------------
// Experiments

enum ExitCode : int { kExitOk = 0, kExitPlantFault = 1, kExitConfigError = 2 };

struct ExperimentOutcome {
  int exit_code = kExitOk;
  std::filesystem::path directory;
  std::vector<std::vector<double>> max_abs_error;  // per iteration
  std::vector<std::vector<double>> rms_error;
  bool converged = false;
  int converged_at = -1;
  std::string message;
};

// Runs seeding plus learning and writes the run directory:
//   config.ini            resolved configuration (print_config format)
//   config_source.ini     verbatim input text, when given
//   reference.csv, seed.csv
//   iterations/iter_NN.csv  t,u1,u2,y1,y2,e1,e2
//   iterations/iter_NN.json errors, gain statistics, hyperparameters
//   gains/gains_NN.csv     per-frequency gain diagnostics
//   models/model_NN.json   model snapshot after iteration NN
//   convergence.csv, bode_pose_1.csv, bode_pose_2.csv, status.json
ExperimentOutcome run_experiment(const RunConfig& config,
                                 const std::optional<std::string>& source = {});

// Writes summary.txt and summary.csv into the run directory and returns the
// text. Throws InvalidInput for a missing or empty directory.
std::string report(const std::filesystem::path& run_dir);

}  // namespace iml

#endif  // IML_HARNESS_HPP_
