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
#include "iml/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "iml/error.hpp"

namespace iml {

StateSpace zoh_discretize(const StateSpace& continuous, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("zoh_discretize: dt must be positive");
  const Eigen::Index n = continuous.A.rows();
  const Eigen::Index m = continuous.B.cols();
  StateSpace d = continuous;
  if (n == 0) return d;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = continuous.A * dt;
  aug.topRightCorner(n, m) = continuous.B * dt;
  const Eigen::MatrixXd e = aug.exp();
  d.A = e.topLeftCorner(n, n);
  d.B = e.topRightCorner(n, m);
  return d;
}

Eigen::MatrixXcd discrete_response(const StateSpace& discrete, double omega,
                                   double dt) {
  const Eigen::Index n = discrete.A.rows();
  Eigen::MatrixXcd g = discrete.D.cast<Complex>();
  if (n == 0) return g;
  const Complex z = std::polar(1.0, omega * dt);
  const Eigen::MatrixXcd zi_minus_a =
      z * Eigen::MatrixXcd::Identity(n, n) - discrete.A.cast<Complex>();
  g += discrete.C.cast<Complex>() *
       zi_minus_a.partialPivLu().solve(discrete.B.cast<Complex>());
  return g;
}

void ArmParams::validate() const {
  const double values[] = {l1,
                           l2,
                           tip_mass,
                           link_mass,
                           spring_stiffness,
                           continuous_torque_limit,
                           peak_torque_limit,
                           motor_speed_limit,
                           servo_bandwidth,
                           joint_damping};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("ArmParams: physical parameters must be positive");
    }
  }
  if (peak_torque_limit < continuous_torque_limit) {
    throw InvalidInput("ArmParams: peak torque below continuous torque");
  }
  if (!std::isfinite(gravity[0]) || !std::isfinite(gravity[1])) {
    throw InvalidInput("ArmParams: non-finite gravity");
  }
}

bool PlantState::finite() const noexcept {
  for (int i = 0; i < 2; ++i) {
    if (!std::isfinite(theta[i]) || !std::isfinite(theta_dot[i]) ||
        !std::isfinite(motor[i]) || !std::isfinite(motor_dot[i])) {
      return false;
    }
  }
  return true;
}

namespace {

struct Inertia {
  double a, b, h;
};

Inertia inertia(const ArmParams& p) {
  const double m = p.link_mass;
  const double lc1 = 0.5 * p.l1;
  const double lc2 = 0.5 * p.l2;
  const double i1 = m * p.l1 * p.l1 / 12.0;
  const double i2 = m * p.l2 * p.l2 / 12.0;
  return {i1 + m * lc1 * lc1 + (m + p.tip_mass) * p.l1 * p.l1,
          i2 + m * lc2 * lc2 + p.tip_mass * p.l2 * p.l2,
          (m * lc2 + p.tip_mass * p.l2) * p.l1};
}

// Generalized gravity force dV/dtheta.
Eigen::Vector2d gravity_torque(double t1, double t2, const ArmParams& p) {
  if (p.gravity[0] == 0.0 && p.gravity[1] == 0.0) {
    return Eigen::Vector2d::Zero();
  }
  const Eigen::Vector2d g(p.gravity[0], p.gravity[1]);
  const Eigen::Vector2d d1(-std::sin(t1), std::cos(t1));
  const Eigen::Vector2d d12(-std::sin(t1 + t2), std::cos(t1 + t2));
  const double m = p.link_mass;
  const double lc1 = 0.5 * p.l1;
  const double lc2 = 0.5 * p.l2;
  // Jacobian columns of each point mass position.
  const Eigen::Vector2d c1_t1 = lc1 * d1;
  const Eigen::Vector2d c2_t1 = p.l1 * d1 + lc2 * d12;
  const Eigen::Vector2d c2_t2 = lc2 * d12;
  const Eigen::Vector2d tip_t1 = p.l1 * d1 + p.l2 * d12;
  const Eigen::Vector2d tip_t2 = p.l2 * d12;
  Eigen::Vector2d tau;
  tau(0) = -(m * g.dot(c1_t1) + m * g.dot(c2_t1) + p.tip_mass * g.dot(tip_t1));
  tau(1) = -(m * g.dot(c2_t2) + p.tip_mass * g.dot(tip_t2));
  return tau;
}

PlantState advance(const PlantState& s, const StateDerivative& d, double h) {
  PlantState out = s;
  for (int i = 0; i < 2; ++i) {
    out.theta[i] += h * d.theta_dot[i];
    out.theta_dot[i] += h * d.theta_ddot[i];
    out.motor[i] += h * d.motor_dot[i];
  }
  return out;
}

}  // namespace

Eigen::Matrix2d arm_mass_matrix(std::span<const double> theta,
                                const ArmParams& params) {
  const Inertia in = inertia(params);
  const double c2 = std::cos(theta[1]);
  Eigen::Matrix2d m;
  m(0, 0) = in.a + in.b + 2.0 * in.h * c2;
  m(0, 1) = in.b + in.h * c2;
  m(1, 0) = m(0, 1);
  m(1, 1) = in.b;
  return m;
}

StateDerivative arm_dynamics(const PlantState& state,
                             std::span<const double> command,
                             const ArmParams& params) {
  if (command.size() != 2) {
    throw InvalidInput("arm_dynamics: expected two motor commands");
  }
  const Inertia in = inertia(params);
  const double s2 = std::sin(state.theta[1]);
  const double w1 = state.theta_dot[0];
  const double w2 = state.theta_dot[1];
  StateDerivative d;
  Eigen::Vector2d rhs;
  for (int i = 0; i < 2; ++i) {
    const double raw =
        params.spring_stiffness * (state.motor[i] - state.theta[i]);
    const double tau = std::clamp(raw, -params.peak_torque_limit,
                                  params.peak_torque_limit);
    if (tau != raw) d.saturated = true;
    rhs(i) = tau - params.joint_damping * state.theta_dot[i];
    d.motor_dot[i] = std::clamp(
        params.servo_bandwidth * (command[i] - state.motor[i]),
        -params.motor_speed_limit, params.motor_speed_limit);
    d.theta_dot[i] = state.theta_dot[i];
  }
  rhs(0) += in.h * s2 * (2.0 * w1 * w2 + w2 * w2);
  rhs(1) -= in.h * s2 * w1 * w1;
  rhs -= gravity_torque(state.theta[0], state.theta[1], params);
  const Eigen::Vector2d acc =
      arm_mass_matrix(state.theta, params).ldlt().solve(rhs);
  d.theta_ddot = {acc(0), acc(1)};
  for (int i = 0; i < 2; ++i) {
    if (!std::isfinite(d.theta_ddot[i]) || !std::isfinite(d.motor_dot[i])) {
      throw SimulationFault("arm_dynamics: non-finite derivative");
    }
  }
  return d;
}

PlantState rk4_step(const PlantState& state, std::span<const double> command,
                    const ArmParams& params, double dt, bool* saturated) {
  const StateDerivative k1 = arm_dynamics(state, command, params);
  const StateDerivative k2 =
      arm_dynamics(advance(state, k1, 0.5 * dt), command, params);
  const StateDerivative k3 =
      arm_dynamics(advance(state, k2, 0.5 * dt), command, params);
  const StateDerivative k4 =
      arm_dynamics(advance(state, k3, dt), command, params);
  PlantState out = state;
  for (int i = 0; i < 2; ++i) {
    out.theta[i] += dt / 6.0 *
                    (k1.theta_dot[i] + 2.0 * k2.theta_dot[i] +
                     2.0 * k3.theta_dot[i] + k4.theta_dot[i]);
    out.theta_dot[i] += dt / 6.0 *
                        (k1.theta_ddot[i] + 2.0 * k2.theta_ddot[i] +
                         2.0 * k3.theta_ddot[i] + k4.theta_ddot[i]);
    out.motor[i] += dt / 6.0 *
                    (k1.motor_dot[i] + 2.0 * k2.motor_dot[i] +
                     2.0 * k3.motor_dot[i] + k4.motor_dot[i]);
  }
  const StateDerivative end = arm_dynamics(out, command, params);
  out.motor_dot = end.motor_dot;
  if (saturated != nullptr) {
    *saturated = k1.saturated || k2.saturated || k3.saturated ||
                 k4.saturated || end.saturated;
  }
  return out;
}

SeaArm::SeaArm(ArmParams params, SimulationOptions options)
    : params_(params), options_(options), rng_(options.seed) {
  params_.validate();
  if (!(options_.dt > 0.0) || !(options_.divergence_limit > 0.0) ||
      !(options_.measurement_noise >= 0.0)) {
    throw InvalidInput("SeaArm: invalid simulation options");
  }
  constexpr int kPoses = 9;
  for (int i = 0; i < kPoses; ++i) {
    const double pose[2] = {0.0, std::numbers::pi * i / (kPoses - 1)};
    const Eigen::VectorXcd ev =
        Eigen::EigenSolver<Eigen::MatrixXd>(linearize(pose).A, false)
            .eigenvalues();
    fastest_rate_ = std::max(fastest_rate_, ev.cwiseAbs().maxCoeff());
  }
}

PlantRun SeaArm::execute(const TimeSeries& u) {
  if (u.channel_count() != 2 || u.size() == 0) {
    throw InvalidInput("SeaArm::execute: expected two input channels");
  }
  const double fs = u.sample_rate();
  const auto substeps = static_cast<std::size_t>(
      std::max({1.0, std::round(1.0 / (fs * options_.dt)),
                std::ceil(fastest_rate_ / fs)}));
  const double h = 1.0 / (fs * static_cast<double>(substeps));
  const auto u1 = u.channel(0);
  const auto u2 = u.channel(1);
  const std::size_t n = u.size();

  PlantState s;
  s.theta = {u1[0], u2[0]};
  s.motor = s.theta;
  std::vector<double> y1;
  std::vector<double> y2;
  y1.reserve(n);
  y2.reserve(n);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto measure = [&](double v) {
    return options_.measurement_noise > 0.0
               ? v + options_.measurement_noise * noise(rng_)
               : v;
  };

  PlantRun run;
  for (std::size_t k = 0; k < n; ++k) {
    y1.push_back(measure(s.theta[0]));
    y2.push_back(measure(s.theta[1]));
    if (k + 1 == n) break;
    const double cmd[2] = {u1[k], u2[k]};
    try {
      for (std::size_t sub = 0; sub < substeps; ++sub) {
        bool sat = false;
        s = rk4_step(s, cmd, params_, h, &sat);
        run.saturated = run.saturated || sat;
        if (!s.finite()) throw SimulationFault("non-finite state");
        for (int i = 0; i < 2; ++i) {
          if (std::abs(s.motor[i] - s.theta[i]) > options_.divergence_limit) {
            throw SimulationFault(fmt::format(
                "spring deflection on joint {} exceeded {} rad", i + 1,
                options_.divergence_limit));
          }
        }
      }
    } catch (const SimulationFault& e) {
      run.fault = true;
      run.message =
          fmt::format("fault at t = {:.3f} s: {}", u.time_at(k + 1), e.what());
      break;
    }
    if (run.saturated && options_.fault_on_saturation) {
      run.fault = true;
      run.message = fmt::format("torque saturation at t = {:.3f} s",
                                u.time_at(k + 1));
      break;
    }
  }
  if (run.saturated && run.message.empty()) {
    run.message = "spring torque reached the peak limit";
  }
  run.output = TimeSeries(fs, u.start_time());
  run.output.add_channel("y1", std::move(y1));
  run.output.add_channel("y2", std::move(y2));
  return run;
}

StateSpace SeaArm::linearize(std::span<const double> pose) const {
  if (pose.size() != 2) throw InvalidInput("SeaArm::linearize: need 2 angles");
  const Eigen::Matrix2d m = arm_mass_matrix(pose, params_);
  const Eigen::Matrix2d m_inv = m.inverse();
  const Eigen::Matrix2d k =
      params_.spring_stiffness * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d damping =
      params_.joint_damping * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d dg;
  const double eps = 1e-6;
  for (int j = 0; j < 2; ++j) {
    double plus[2] = {pose[0], pose[1]};
    double minus[2] = {pose[0], pose[1]};
    plus[j] += eps;
    minus[j] -= eps;
    dg.col(j) = (gravity_torque(plus[0], plus[1], params_) -
                 gravity_torque(minus[0], minus[1], params_)) /
                (2.0 * eps);
  }
  const double bw = params_.servo_bandwidth;
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(6, 6);
  ss.A.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
  ss.A.block<2, 2>(2, 0) = -m_inv * (k + dg);
  ss.A.block<2, 2>(2, 2) = -m_inv * damping;
  ss.A.block<2, 2>(2, 4) = m_inv * k;
  ss.A.block<2, 2>(4, 4) = -bw * Eigen::Matrix2d::Identity();
  ss.B = Eigen::MatrixXd::Zero(6, 2);
  ss.B.block<2, 2>(4, 0) = bw * Eigen::Matrix2d::Identity();
  ss.C = Eigen::MatrixXd::Zero(2, 6);
  ss.C.block<2, 2>(0, 0) = Eigen::Matrix2d::Identity();
  ss.D = Eigen::MatrixXd::Zero(2, 2);
  return ss;
}

std::optional<Eigen::MatrixXcd> SeaArm::frequency_response(
    double omega, std::span<const double> params, double sample_rate) const {
  if (params.size() != 2 || !(sample_rate > 0.0)) return std::nullopt;
  const double dt = 1.0 / sample_rate;
  return discrete_response(zoh_discretize(linearize(params), dt), omega, dt);
}

}  // namespace iml
