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
#ifndef IML_PLANT_HPP_
#define IML_PLANT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iml/signals.hpp"

namespace iml {

// Result of one trajectory execution. On a fault the output is truncated at
// the last valid sample.
struct PlantRun {
  TimeSeries output;
  bool fault = false;
  bool saturated = false;
  std::string message;
};

// Anything that maps a full input trajectory to a full output trajectory.
// Inputs are read by channel index; outputs are named y1..yN.
class Plant {
 public:
  virtual ~Plant() = default;

  virtual std::size_t n_inputs() const = 0;
  virtual std::size_t n_outputs() const = 0;
  virtual PlantRun execute(const TimeSeries& u) = 0;

  // Sampled-data frequency response at omega (rad/s) for a sampling rate,
  // linearized at params when the plant is parameter-varying. Plants without
  // an analytic model return nullopt.
  virtual std::optional<Eigen::MatrixXcd> frequency_response(
      double omega, std::span<const double> params, double sample_rate) const {
    (void)omega;
    (void)params;
    (void)sample_rate;
    return std::nullopt;
  }
};

// Continuous or discrete linear state-space model x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
};

// Zero-order-hold discretization with sample period dt.
StateSpace zoh_discretize(const StateSpace& continuous, double dt);

// C (z I - A)^-1 B + D at z = exp(j omega dt) for a discrete model.
Eigen::MatrixXcd discrete_response(const StateSpace& discrete, double omega,
                                   double dt);

// ---------------------------------------------------------------------------
// Two-link series-elastic arm.

struct ArmParams {
  double l1 = 0.15875;
  double l2 = 0.2667;
  double tip_mass = 0.275;
  double link_mass = 0.12;
  double spring_stiffness = 70.0;
  double continuous_torque_limit = 4.0;
  double peak_torque_limit = 7.0;
  double motor_speed_limit = 32.0 * 2.0 * 3.14159265358979323846 / 60.0;
  double servo_bandwidth = 2.0 * 3.14159265358979323846 * 5.0;
  // First mode damping ratio about 0.2 to 0.37 across poses.
  double joint_damping = 1.0;
  // Gravity in the arm plane (m/s^2); zero for a horizontal arm.
  std::array<double, 2> gravity{0.0, 0.0};

  void validate() const;
  bool operator==(const ArmParams&) const = default;
};

struct PlantState {
  std::array<double, 2> theta{};
  std::array<double, 2> theta_dot{};
  std::array<double, 2> motor{};
  // Motor velocities are set by the servo law; kept for reporting.
  std::array<double, 2> motor_dot{};

  bool finite() const noexcept;
};

struct StateDerivative {
  std::array<double, 2> theta_dot{};
  std::array<double, 2> theta_ddot{};
  std::array<double, 2> motor_dot{};
  bool saturated = false;
};

// Load side:  M(theta) theta'' + C(theta, theta') theta' + D theta' + g(theta)
//             = clamp(k (theta_m - theta), +-peak_torque_limit)
// Motor side: theta_m' = clamp(bw (u - theta_m), +-motor_speed_limit)
// Links are uniform rods of link_mass with the tip mass at the end of link 2.
// Throws SimulationFault on a non-finite derivative.
StateDerivative arm_dynamics(const PlantState& state,
                             std::span<const double> command,
                             const ArmParams& params);

// Mass matrix and kinetic plus spring energy, exposed for diagnostics.
Eigen::Matrix2d arm_mass_matrix(std::span<const double> theta,
                                const ArmParams& params);

// One classical RK4 step with the command held constant.
PlantState rk4_step(const PlantState& state, std::span<const double> command,
                    const ArmParams& params, double dt, bool* saturated);

struct SimulationOptions {
  double dt = 1e-3;
  double measurement_noise = 0.0;
  std::uint64_t seed = 0;
  double divergence_limit = 1.0;
  bool fault_on_saturation = false;
};

// Two-link arm driven by commanded motor angles. Each execution starts at
// rest with load and motor angles equal to the first command. The RK4 step is
// options.dt, refined when the fastest linearized mode would make it unstable. Measurement
// noise draws from a generator seeded at construction and advanced across
// executions.
class SeaArm final : public Plant {
 public:
  explicit SeaArm(ArmParams params = {}, SimulationOptions options = {});

  std::size_t n_inputs() const override { return 2; }
  std::size_t n_outputs() const override { return 2; }
  PlantRun execute(const TimeSeries& u) override;

  // ZOH-sampled response of the arm linearized at rest at pose params.
  std::optional<Eigen::MatrixXcd> frequency_response(
      double omega, std::span<const double> params,
      double sample_rate) const override;

  // Continuous linearization at rest at the pose (states: theta, theta',
  // theta_m; inputs u; outputs theta).
  StateSpace linearize(std::span<const double> pose) const;

  const ArmParams& params() const noexcept { return params_; }
  const SimulationOptions& options() const noexcept { return options_; }

 private:
  ArmParams params_;
  SimulationOptions options_;
  std::mt19937_64 rng_;
  double fastest_rate_ = 0.0;
};

// ---------------------------------------------------------------------------
// Exact linear test plant.

// Rational transfer function in s, coefficients from the highest power down.
struct RationalTf {
  std::vector<double> numerator{0.0};
  std::vector<double> denominator{1.0};
};

enum class ConvolutionMode {
  // Zero-padded: reproduces the response of a plant at rest at t = 0.
  linear,
  // Periodic: y = IDFT(G(e^{j w T}) DFT(u)) on the trajectory grid.
  circular,
};

// Matrix of rational transfer functions, discretized by zero-order hold at
// the rate of each input signal and applied by frequency-domain
// multiplication. Throws InvalidInput for an improper entry or a pole with
// nonnegative real part.
class LtiPlant final : public Plant {
 public:
  LtiPlant(std::vector<std::vector<RationalTf>> entries,
           ConvolutionMode mode = ConvolutionMode::linear);

  static LtiPlant scalar(RationalTf g,
                         ConvolutionMode mode = ConvolutionMode::linear);

  // INI description: [plant] inputs, outputs, mode; one [gIJ] section per
  // nonzero entry (1-based) with space-separated num and den.
  static LtiPlant from_file(const std::filesystem::path& path);

  std::size_t n_inputs() const override { return n_inputs_; }
  std::size_t n_outputs() const override { return entries_.size(); }
  PlantRun execute(const TimeSeries& u) override;

  std::optional<Eigen::MatrixXcd> frequency_response(
      double omega, std::span<const double> params,
      double sample_rate) const override;

  // Continuous-time response G(j omega).
  Eigen::MatrixXcd continuous_response(double omega) const;

  ConvolutionMode mode() const noexcept { return mode_; }

 private:
  struct Entry {
    RationalTf tf;
    StateSpace realization;
    double slowest_pole = 0.0;
    bool zero = true;
  };
  const Entry& entry(std::size_t i, std::size_t j) const {
    return entries_[i][j];
  }
  std::size_t padded_length(std::size_t n, double sample_rate) const;

  std::vector<std::vector<Entry>> entries_;
  std::size_t n_inputs_ = 0;
  ConvolutionMode mode_;
};

}  // namespace iml

#endif  // IML_PLANT_HPP_
