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
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "iml/error.hpp"
#include "iml/plant.hpp"
#include "iml/signals.hpp"
#include "oracles.hpp"

namespace iml {
namespace {

constexpr double kPi = oracle::kPi;

TimeSeries single(std::vector<double> v, double fs = 100.0) {
  TimeSeries u(fs);
  u.add_channel("u1", std::move(v));
  return u;
}

RationalTf second_order(double wn, double zeta) {
  return {{wn * wn}, {1.0, 2.0 * zeta * wn, wn * wn}};
}

TEST(LtiPlantTest, UnitGainPassesInputThrough) {
  LtiPlant g = LtiPlant::scalar({{1.0}, {1.0}});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> u(123);
  for (auto& v : u) v = d(rng);
  const PlantRun run = g.execute(single(u));
  ASSERT_EQ(run.output.size(), u.size());
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(run.output.channel(0)[k], u[k], 1e-12);
}

TEST(LtiPlantTest, FirstOrderStepResponse) {
  LtiPlant g = LtiPlant::scalar({{1.0}, {1.0, 1.0}});
  const PlantRun run = g.execute(single(std::vector<double>(1000, 1.0)));
  double worst = 0.0;
  for (std::size_t k = 0; k < 1000; ++k) {
    const double t = static_cast<double>(k) / 100.0;
    worst = std::max(worst, std::abs(run.output.channel(0)[k] - (1.0 - std::exp(-t))));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(LtiPlantTest, SecondOrderStepResponse) {
  const double wn = 2.0 * kPi * 2.0;
  LtiPlant g = LtiPlant::scalar(second_order(wn, 0.7));
  const PlantRun run = g.execute(single(std::vector<double>(500, 1.0)));
  for (std::size_t k = 0; k < 500; ++k) {
    const double t = static_cast<double>(k) / 100.0;
    EXPECT_NEAR(run.output.channel(0)[k], oracle::second_order_step(t, wn, 0.7), 1e-6);
  }
}

TEST(LtiPlantTest, DiagonalPlantHasNoCrossTalk) {
  std::vector<std::vector<RationalTf>> m(2, std::vector<RationalTf>(2));
  m[0][0] = second_order(10.0, 0.5);
  m[1][1] = {{3.0}, {1.0, 3.0}};
  LtiPlant g(m);
  TimeSeries u(100.0);
  std::vector<double> step(200, 0.0);
  for (std::size_t k = 10; k < 200; ++k) step[k] = 1.0;
  u.add_channel("u1", step).add_channel("u2", std::vector<double>(200, 0.0));
  const PlantRun run = g.execute(u);
  for (double v : run.output.channel(1)) EXPECT_EQ(v, 0.0);
  EXPECT_GT(run.output.channel(0).back(), 0.9);
  EXPECT_EQ(g.n_inputs(), 2u);
  EXPECT_EQ(g.n_outputs(), 2u);
}

TEST(LtiPlantTest, ContinuousResponseMatchesClosedForm) {
  LtiPlant g = LtiPlant::scalar(second_order(12.0, 0.3));
  for (double w : {0.0, 1.0, 12.0, 40.0}) {
    EXPECT_LT(std::abs(g.continuous_response(w)(0, 0) - oracle::second_order(w, 12.0, 0.3)),
              1e-12);
  }
}

TEST(LtiPlantTest, DiscreteResponseApproachesContinuousAtLowFrequency) {
  LtiPlant g = LtiPlant::scalar(second_order(12.0, 0.3));
  const std::vector<double> none;
  const auto d = g.frequency_response(0.5, none, 1000.0);
  ASSERT_TRUE(d.has_value());
  EXPECT_LT(std::abs((*d)(0, 0) - oracle::second_order(0.5, 12.0, 0.3)), 1e-3);
  EXPECT_LT(std::abs((*g.frequency_response(0.0, none, 100.0))(0, 0) - 1.0), 1e-12);
}

TEST(LtiPlantTest, CircularModeIsSpectralMultiplication) {
  LtiPlant g = LtiPlant::scalar(second_order(15.0, 0.4), ConvolutionMode::circular);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 1.0);
  const std::size_t n = 64;
  std::vector<double> u(n);
  for (auto& v : u) v = d(rng);
  const PlantRun run = g.execute(single(u, 50.0));
  const Spectrum su = forward_transform(u, 50.0);
  std::vector<Complex> prod(su.size());
  const std::vector<double> none;
  for (std::size_t k = 0; k < su.size(); ++k) {
    prod[k] = su[k] * (*g.frequency_response(su.frequencies()[k], none, 50.0))(0, 0);
  }
  const auto expected = inverse_transform(Spectrum(su.frequencies(), prod), n, 50.0);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(run.output.channel(0)[k], expected[k], 1e-10);
}

TEST(LtiPlantTest, RejectsInvalidDescriptions) {
  EXPECT_THROW(LtiPlant::scalar({{1.0}, {1.0, -1.0}}), InvalidInput);
  EXPECT_THROW(LtiPlant::scalar({{1.0}, {1.0, 0.0}}), InvalidInput);
  EXPECT_THROW(LtiPlant::scalar({{1.0, 0.0, 0.0}, {1.0, 1.0}}), InvalidInput);
  EXPECT_THROW(LtiPlant::scalar({{1.0}, {}}), InvalidInput);
  EXPECT_THROW(LtiPlant({}), InvalidInput);
  LtiPlant g = LtiPlant::scalar({{1.0}, {1.0, 1.0}});
  TimeSeries two(100.0);
  two.add_channel("a", {1.0, 2.0}).add_channel("b", {1.0, 2.0});
  EXPECT_THROW(g.execute(two), InvalidInput);
}

TEST(LtiPlantTest, LoadsIniDescription) {
  const auto dir = std::filesystem::temp_directory_path() / "iml_lti_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "plant.ini";
  {
    std::ofstream out(path);
    out << "[plant]\ninputs = 2\noutputs = 2\nmode = circular\n\n"
           "[g11]\nnum = 4\nden = 1 4\n\n[g21]\nnum = 1\nden = 1 2 1\n";
  }
  const LtiPlant g = LtiPlant::from_file(path);
  EXPECT_EQ(g.mode(), ConvolutionMode::circular);
  const Eigen::MatrixXcd r = g.continuous_response(0.0);
  EXPECT_NEAR(r(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(r(1, 0).real(), 1.0, 1e-14);
  EXPECT_EQ(r(0, 1), Complex(0.0));
  EXPECT_EQ(r(1, 1), Complex(0.0));

  {
    std::ofstream out(path);
    out << "[plant]\ninputs = 1\noutputs = 1\n\n[g31]\nnum = 1\nden = 1 1\n";
  }
  EXPECT_THROW(LtiPlant::from_file(path), InvalidInput);
  {
    std::ofstream out(path);
    out << "[plant]\ninputs = 1\noutputs = 1\nmode = sideways\n";
  }
  EXPECT_THROW(LtiPlant::from_file(path), InvalidInput);
  EXPECT_THROW(LtiPlant::from_file(dir / "missing.ini"), InvalidInput);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace iml
