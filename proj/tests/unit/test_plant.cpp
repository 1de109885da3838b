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
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "iml/error.hpp"
#include "iml/plant.hpp"
#include "oracles.hpp"

namespace iml {
namespace {

constexpr double kPi = oracle::kPi;

oracle::Chain chain(const ArmParams& p) {
  return {p.l1, p.l2, p.link_mass, p.tip_mass};
}

double energy(const PlantState& s, const ArmParams& p) {
  double e = oracle::kinetic_energy(chain(p), s.theta, s.theta_dot);
  for (int i = 0; i < 2; ++i) {
    const double d = s.motor[i] - s.theta[i];
    e += 0.5 * p.spring_stiffness * d * d;
  }
  return e;
}

TimeSeries constant_input(std::vector<double> a, std::vector<double> b) {
  TimeSeries u(100.0);
  u.add_channel("u1", std::move(a)).add_channel("u2", std::move(b));
  return u;
}

TEST(ArmParamsTest, Validate) {
  ArmParams p;
  EXPECT_NO_THROW(p.validate());
  p.tip_mass = -1.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = ArmParams{};
  p.spring_stiffness = 0.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = ArmParams{};
  p.joint_damping = -0.1;
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(ArmDynamicsTest, MassMatrixMatchesKineticEnergy) {
  const ArmParams p;
  for (double q2 : {0.0, 0.7, kPi / 2.0, 2.5, kPi}) {
    const std::array<double, 2> q{0.3, q2};
    const std::array<double, 2> qd{1.1, -0.6};
    const Eigen::Matrix2d m = arm_mass_matrix(q, p);
    const Eigen::Vector2d v(qd[0], qd[1]);
    EXPECT_NEAR(0.5 * v.dot(m * v), oracle::kinetic_energy(chain(p), q, qd), 1e-14);
  }
}

TEST(ArmDynamicsTest, EquilibriumHasZeroDerivative) {
  PlantState s;
  s.theta = {0.4, -1.2};
  s.motor = s.theta;
  const std::array<double, 2> cmd{0.4, -1.2};
  const StateDerivative d = arm_dynamics(s, cmd, ArmParams{});
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(d.theta_dot[i], 0.0);
    EXPECT_EQ(d.theta_ddot[i], 0.0);
    EXPECT_EQ(d.motor_dot[i], 0.0);
  }
  EXPECT_FALSE(d.saturated);
  const std::array<double, 1> short_cmd{0.0};
  EXPECT_THROW(arm_dynamics(s, short_cmd, ArmParams{}), InvalidInput);
}

TEST(ArmDynamicsTest, UndampedEnergyConserved) {
  ArmParams p;
  p.joint_damping = 0.0;
  PlantState s;
  s.theta = {0.05, -0.04};
  s.motor = {0.0, 0.0};
  const std::array<double, 2> cmd{0.0, 0.0};
  const double e0 = energy(s, p);
  double worst = 0.0;
  // The fast elastic mode sits near 360 rad/s; the step resolves it.
  for (int k = 0; k < 20000; ++k) {
    bool sat = false;
    s = rk4_step(s, cmd, p, 1e-4, &sat);
    ASSERT_FALSE(sat);
    worst = std::max(worst, std::abs(energy(s, p) - e0) / e0);
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(ArmDynamicsTest, DampedEnergyNonincreasing) {
  const ArmParams p;
  PlantState s;
  s.theta = {0.06, -0.05};
  const std::array<double, 2> cmd{0.0, 0.0};
  double prev = energy(s, p);
  for (int k = 0; k < 3000; ++k) {
    s = rk4_step(s, cmd, p, 1e-3, nullptr);
    const double e = energy(s, p);
    EXPECT_LE(e, prev + 1e-9);
    prev = e;
  }
}

TEST(SeaArmTest, ZeroInputGivesZeroOutput) {
  SeaArm arm;
  const PlantRun run = arm.execute(constant_input(std::vector<double>(300, 0.0),
                                                  std::vector<double>(300, 0.0)));
  EXPECT_FALSE(run.fault);
  EXPECT_FALSE(run.saturated);
  ASSERT_EQ(run.output.size(), 300u);
  for (std::size_t c = 0; c < 2; ++c) {
    for (double v : run.output.channel(c)) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(run.output.names(), (std::vector<std::string>{"y1", "y2"}));
}

TEST(SeaArmTest, StepSettlesAtCommand) {
  SeaArm arm;
  std::vector<double> u1(800, 0.0);
  for (std::size_t k = 50; k < u1.size(); ++k) u1[k] = 0.05;
  const PlantRun run = arm.execute(constant_input(u1, std::vector<double>(800, 0.0)));
  ASSERT_FALSE(run.fault);
  EXPECT_NEAR(run.output.channel(0).back(), 0.05, 1e-6);
  EXPECT_NEAR(run.output.channel(1).back(), 0.0, 1e-6);
  // The sample at index k is taken before the command at k is applied.
  EXPECT_EQ(run.output.channel(0)[50], 0.0);
  EXPECT_NE(run.output.channel(0)[51], 0.0);
}

TEST(SeaArmTest, DeterministicForSeed) {
  SimulationOptions opt;
  opt.measurement_noise = 1e-3;
  opt.seed = 42;
  const TimeSeries u = constant_input(std::vector<double>(200, 0.1),
                                      std::vector<double>(200, -0.1));
  SeaArm a(ArmParams{}, opt);
  SeaArm b(ArmParams{}, opt);
  EXPECT_EQ(a.execute(u).output, b.execute(u).output);
  opt.seed = 43;
  SeaArm c(ArmParams{}, opt);
  EXPECT_NE(SeaArm(ArmParams{}, {.measurement_noise = 1e-3, .seed = 42})
                .execute(u)
                .output,
            c.execute(u).output);
}

TEST(SeaArmTest, LargeStepSaturatesAndTinyLimitFaults) {
  std::vector<double> u1(300, 0.0);
  for (std::size_t k = 20; k < u1.size(); ++k) u1[k] = 1.0;
  const TimeSeries u = constant_input(u1, std::vector<double>(300, 0.0));
  SeaArm arm;
  const PlantRun sat = arm.execute(u);
  EXPECT_TRUE(sat.saturated);
  EXPECT_FALSE(sat.fault);

  SimulationOptions opt;
  opt.divergence_limit = 0.01;
  SeaArm strict(ArmParams{}, opt);
  const PlantRun fault = strict.execute(u);
  EXPECT_TRUE(fault.fault);
  EXPECT_LT(fault.output.size(), 300u);
  EXPECT_GT(fault.output.size(), 20u);
  EXPECT_NE(fault.message.find("deflection"), std::string::npos);

  opt = SimulationOptions{};
  opt.fault_on_saturation = true;
  SeaArm picky(ArmParams{}, opt);
  EXPECT_TRUE(picky.execute(u).fault);
}

TEST(SeaArmTest, RejectsBadInput) {
  SeaArm arm;
  TimeSeries one(100.0);
  one.add_channel("u1", {0.0, 0.0});
  EXPECT_THROW(arm.execute(one), InvalidInput);
  SimulationOptions opt;
  opt.dt = 0.0;
  EXPECT_THROW(SeaArm(ArmParams{}, opt), InvalidInput);
}

TEST(SeaArmTest, HeavyDampingStaysStable) {
  ArmParams p;
  p.joint_damping = 2.0;
  SeaArm arm(p);
  std::vector<double> u1(300, 0.0);
  for (std::size_t k = 50; k < u1.size(); ++k) u1[k] = 0.314;
  const PlantRun run = arm.execute(constant_input(u1, std::vector<double>(300, 0.0)));
  EXPECT_FALSE(run.fault);
  EXPECT_NEAR(run.output.channel(0).back(), 0.314, 1e-3);
}

TEST(SeaArmTest, LinearizationHasUnitDcGain) {
  SeaArm arm;
  const std::vector<double> pose{kPi / 2.0, 0.0};
  const StateSpace lin = arm.linearize(pose);
  EXPECT_EQ(lin.A.rows(), 6);
  const auto g0 = arm.frequency_response(0.0, pose, 100.0);
  ASSERT_TRUE(g0.has_value());
  EXPECT_LT((*g0 - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-9);
}

// Small chirp around a pose; the measured response of each diagonal entry
// must match the linearized model.
TEST(SeaArmTest, ChirpMatchesLinearization) {
  const double fs = 100.0;
  const std::vector<double> pose{kPi / 2.0, 0.0};
  const double t_chirp = 60.0;
  const std::size_t n = static_cast<std::size_t>((t_chirp + 10.0) * fs);
  SeaArm arm;
  for (std::size_t ch = 0; ch < 2; ++ch) {
    std::vector<double> du(n, 0.0);
    const double f0 = 0.1;
    const double f1 = 5.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / fs;
      if (t >= t_chirp) break;
      const double phase = 2.0 * kPi * (f0 * t + 0.5 * (f1 - f0) * t * t / t_chirp);
      const double taper = std::min({1.0, t / 1.0, (t_chirp - t) / 1.0});
      du[k] = 0.004 * taper * std::sin(phase);
    }
    std::vector<double> u1(n, pose[0]);
    std::vector<double> u2(n, pose[1]);
    auto& target = ch == 0 ? u1 : u2;
    for (std::size_t k = 0; k < n; ++k) target[k] += du[k];
    const PlantRun run = arm.execute(constant_input(u1, u2));
    ASSERT_FALSE(run.fault);
    ASSERT_FALSE(run.saturated);
    std::vector<double> dy(n);
    for (std::size_t k = 0; k < n; ++k) dy[k] = run.output.channel(ch)[k] - pose[ch];
    const auto U = oracle::direct_dft(du);
    const auto Y = oracle::direct_dft(dy);
    double u_max = 0.0;
    for (const auto& v : U) u_max = std::max(u_max, std::abs(v));
    int compared = 0;
    for (std::size_t k = 1; k < U.size(); ++k) {
      const double w = 2.0 * kPi * static_cast<double>(k) * fs / static_cast<double>(n);
      if (w < 2.0 * kPi * 0.2 || w > 2.0 * kPi * 4.8) continue;
      if (std::abs(U[k]) < 0.3 * u_max) continue;
      const Complex measured = Y[k] / U[k];
      const Complex model = (*arm.frequency_response(w, pose, fs))(ch, ch);
      const double db = 20.0 * std::log10(std::abs(measured) / std::abs(model));
      const double deg = std::abs(std::arg(measured / model)) * 180.0 / kPi;
      EXPECT_LT(std::abs(db), 2.0) << "omega " << w;
      EXPECT_LT(deg, 10.0) << "omega " << w;
      ++compared;
    }
    EXPECT_GT(compared, 100);
  }
}

TEST(StateSpaceTest, FirstOrderZohClosedForm) {
  StateSpace c{Eigen::MatrixXd::Constant(1, 1, -2.0), Eigen::MatrixXd::Constant(1, 1, 3.0),
               Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Zero(1, 1)};
  const double dt = 0.05;
  const StateSpace d = zoh_discretize(c, dt);
  EXPECT_NEAR(d.A(0, 0), std::exp(-2.0 * dt), 1e-14);
  EXPECT_NEAR(d.B(0, 0), 3.0 * (1.0 - std::exp(-2.0 * dt)) / 2.0, 1e-14);
  const double w = 7.0;
  const Complex z = std::exp(Complex(0.0, w * dt));
  EXPECT_LT(std::abs(discrete_response(d, w, dt)(0, 0) - d.B(0, 0) / (z - d.A(0, 0))),
            1e-12);
}

}  // namespace
}  // namespace iml
