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
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "iml/convergence.hpp"
#include "iml/error.hpp"
#include "oracles.hpp"

namespace iml {
namespace {

constexpr double kPi = oracle::kPi;

Eigen::Matrix2cd well_conditioned(std::mt19937_64& rng) {
  for (;;) {
    Eigen::Matrix2cd g = oracle::random_complex(rng, 2, 2);
    g += Eigen::Matrix2cd::Identity() * 1.5;
    if (Eigen::JacobiSVD<Eigen::Matrix2cd>(g).singularValues()(1) > 0.3) return g;
  }
}

TEST(SpectralRadiusTest, PerfectModelAndZeroGain) {
  std::mt19937_64 rng(1);
  const Eigen::Matrix2cd g = well_conditioned(rng);
  const Eigen::Matrix2cd inv = g.inverse();
  EXPECT_LT(iteration_map_spectral_radius(g, inv, Eigen::Vector2d::Ones()), 1e-12);
  EXPECT_NEAR(iteration_map_spectral_radius(g, inv, Eigen::Vector2d::Zero()), 1.0,
              1e-15);
}

TEST(SpectralRadiusTest, MatchesCharacteristicPolynomial) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Matrix2cd g = well_conditioned(rng);
    const Eigen::Matrix2cd inv_est = well_conditioned(rng).inverse();
    const Eigen::Vector2d rho(u(rng), u(rng));
    const Eigen::Matrix2cd map = Eigen::Matrix2cd::Identity() -
                                 rho.cast<Complex>().asDiagonal() * inv_est * g;
    EXPECT_NEAR(iteration_map_spectral_radius(g, inv_est, rho),
                oracle::spectral_radius2x2(map), 1e-10);
  }
}

TEST(ScalarBoundTest, Examples) {
  GainResult r = scalar_gain_bound(1.0, 0.0);
  ASSERT_TRUE(r.feasible[0]);
  EXPECT_DOUBLE_EQ(r.bound(0), 2.0);
  EXPECT_DOUBLE_EQ(r.rho(0), 0.6 * 2.0);

  r = scalar_gain_bound(1.0, kPi / 3.0, 0.5);
  EXPECT_NEAR(r.bound(0), 1.0, 1e-15);
  EXPECT_NEAR(r.rho(0), 0.5, 1e-15);

  r = scalar_gain_bound(1.0, kPi / 2.0);
  EXPECT_FALSE(r.feasible[0]);
  EXPECT_EQ(r.rho(0), 0.0);
  EXPECT_EQ(r.bound(0), 0.0);
  EXPECT_EQ(r.feasible_count(), 0u);
}

TEST(ScalarBoundTest, GainsInsideTheBoundContract) {
  for (double dm : {0.3, 1.0, 2.5}) {
    for (double dp : {-1.4, -0.5, 0.0, 0.9, 1.5}) {
      const GainResult r = scalar_gain_bound(dm, dp, 0.99);
      ASSERT_TRUE(r.feasible[0]);
      const Complex delta = std::polar(dm, dp);
      EXPECT_LT(std::abs(1.0 - r.rho(0) * delta), 1.0);
      // Just outside the bound the iteration diverges.
      EXPECT_GT(std::abs(1.0 - 1.01 * r.bound(0) * delta), 1.0);
    }
  }
}

TEST(MimoBoundTest, PerfectModel) {
  const GainResult r = mimo_gain_bound(Eigen::Matrix3cd::Identity());
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(r.feasible[i]);
    EXPECT_DOUBLE_EQ(r.bound(i), 2.0);
  }
}

TEST(MimoBoundTest, ScalarSpecialization) {
  Eigen::MatrixXcd d(1, 1);
  d(0, 0) = std::polar(1.0, kPi / 3.0);
  const GainResult r = mimo_gain_bound(d);
  EXPECT_NEAR(r.bound(0), 1.0, 1e-12);
  EXPECT_NEAR(r.bound(0), scalar_gain_bound(1.0, kPi / 3.0).bound(0), 1e-12);
}

TEST(MimoBoundTest, HandEvaluatedTwoByTwo) {
  Eigen::Matrix2cd d;
  d << Complex(1.0, 0.2), Complex(0.1, 0.1), Complex(0.3, 0.0), Complex(0.8, -0.4);
  const GainResult r = mimo_gain_bound(d, 1.0);
  const double s0 = std::abs(d(0, 1));
  const double s1 = std::abs(d(1, 0));
  EXPECT_NEAR(r.bound(0), 2.0 * (1.0 - s0) / (std::norm(d(0, 0)) - s0 * s0), 1e-14);
  EXPECT_NEAR(r.bound(1), 2.0 * (0.8 - s1) / (std::norm(d(1, 1)) - s1 * s1), 1e-14);
}

TEST(MimoBoundTest, DominantCouplingIsInfeasible) {
  Eigen::Matrix2cd d;
  d << Complex(0.5, 0.0), Complex(0.6, 0.0), Complex(0.0, 0.0), Complex(1.0, 0.0);
  const GainResult r = mimo_gain_bound(d);
  EXPECT_FALSE(r.feasible[0]);
  EXPECT_EQ(r.rho(0), 0.0);
  EXPECT_TRUE(r.feasible[1]);
}

TEST(MimoBoundTest, FractionOfBoundContracts) {
  std::mt19937_64 rng(3);
  int feasible_trials = 0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Matrix2cd g = well_conditioned(rng);
    const Eigen::Matrix2cd g_est = g + 0.15 * oracle::random_complex(rng, 2, 2);
    const Eigen::Matrix2cd inv = g_est.inverse();
    const GainResult r = mimo_gain_bound(inv * g);
    if (r.feasible_count() < 2) continue;
    ++feasible_trials;
    const Eigen::Matrix2cd map = Eigen::Matrix2cd::Identity() -
                                 r.rho.cast<Complex>().asDiagonal() * inv * g;
    EXPECT_LT(oracle::spectral_radius2x2(map), 1.0);
  }
  EXPECT_GT(feasible_trials, 500);
}

TEST(BoundedUncertaintyTest, ZeroUncertaintyIdentity) {
  ModelErrorBounds b{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
  const GainResult r = bounded_uncertainty_gain(Eigen::Matrix2cd::Identity(), b);
  EXPECT_DOUBLE_EQ(r.bound(0), 2.0);
  EXPECT_DOUBLE_EQ(r.bound(1), 2.0);
}

TEST(BoundedUncertaintyTest, WorstCaseNeverAboveRealizedBound) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> size(0.0, 0.08);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Matrix2cd g_est = well_conditioned(rng);
    ModelErrorBounds b{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
    for (int i = 0; i < 4; ++i) {
      b.delta_a(i) = size(rng);
      b.delta_b(i) = size(rng);
    }
    const GainResult worst = bounded_uncertainty_gain(g_est, b);
    Eigen::Matrix2cd g = g_est;
    for (int i = 0; i < 4; ++i) {
      g(i) += Complex(b.delta_a(i) * unit(rng), b.delta_b(i) * unit(rng));
    }
    const GainResult realized = mimo_gain_bound(g_est.inverse() * g);
    for (int i = 0; i < 2; ++i) {
      if (!worst.feasible[i]) continue;
      ++checked;
      ASSERT_TRUE(realized.feasible[i]);
      EXPECT_LE(worst.bound(i), realized.bound(i) * (1.0 + 1e-12));
    }
    if (worst.feasible_count() == 2) {
      const Eigen::Matrix2cd map =
          Eigen::Matrix2cd::Identity() -
          worst.rho.cast<Complex>().asDiagonal() * g_est.inverse() * g;
      EXPECT_LT(oracle::spectral_radius2x2(map), 1.0);
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(BoundedUncertaintyTest, LargeUncertaintyIsInfeasible) {
  ModelErrorBounds b{Eigen::Matrix2d::Constant(5.0), Eigen::Matrix2d::Constant(5.0)};
  const GainResult r = bounded_uncertainty_gain(Eigen::Matrix2cd::Identity(), b);
  EXPECT_EQ(r.feasible_count(), 0u);
  EXPECT_EQ(r.rho(0), 0.0);
  EXPECT_EQ(r.rho(1), 0.0);
}

TEST(BoundedUncertaintyTest, SingularEstimateThrows) {
  ModelErrorBounds b{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
  EXPECT_THROW(bounded_uncertainty_gain(Eigen::Matrix2cd::Zero(), b), NumericalError);
  ModelErrorBounds wrong{Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Zero()};
  EXPECT_THROW(bounded_uncertainty_gain(Eigen::Matrix2cd::Identity(), wrong),
               InvalidInput);
}

TEST(VarianceToBoundsTest, Examples) {
  EXPECT_EQ(variance_to_bounds(Eigen::Matrix2d::Zero()).delta_a, Eigen::Matrix2d::Zero());
  const ModelErrorBounds one = variance_to_bounds(Eigen::Matrix2d::Ones(), 2.0);
  EXPECT_EQ(one.delta_a, Eigen::Matrix2d::Constant(2.0));
  EXPECT_EQ(one.delta_b, Eigen::Matrix2d::Constant(2.0));
  EXPECT_EQ(variance_to_bounds(Eigen::Matrix2d::Constant(0.25), 2.0).delta_a,
            Eigen::Matrix2d::Constant(1.0));
  EXPECT_THROW(variance_to_bounds(Eigen::Matrix2d::Constant(-1.0)), InvalidInput);
  EXPECT_THROW(variance_to_bounds(Eigen::Matrix2d::Ones(), 0.0), InvalidInput);
}

TEST(VarianceToBoundsTest, PerFrequency) {
  ModelEstimate e;
  e.frequencies = {0.0, 1.0};
  e.mean = {Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Identity(2, 2)};
  e.variance = {Eigen::MatrixXd::Constant(2, 2, 4.0), Eigen::MatrixXd::Zero(2, 2)};
  const auto b = variance_to_bounds(e, 1.0);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].delta_a(0, 0), 2.0);
  EXPECT_EQ(b[1].delta_b(1, 1), 0.0);
}

TEST(GainDiagnosticsTest, CsvLayout) {
  std::ostringstream out;
  const std::vector<GainDiagnostic> rows{{1.5, 0, 2.0, 1.2, true, 0.4}};
  write_gain_diagnostics(out, rows);
  EXPECT_EQ(out.str(),
            "omega,channel,bound,rho,feasible,spectral_radius_check\n"
            "1.5,0,2,1.2,1,0.4\n");
}

}  // namespace
}  // namespace iml
