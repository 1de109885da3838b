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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "iml/error.hpp"
#include "iml/harness.hpp"

namespace iml {
namespace {

std::string printed(const RunConfig& c) {
  std::ostringstream out;
  print_config(c, out);
  return out.str();
}

TEST(ConfigTest, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.trajectory, "slow");
  EXPECT_EQ(c.plant, "sea-arm");
  EXPECT_EQ(c.sample_rate, 100.0);
  EXPECT_EQ(c.learning.max_iterations, 20);
  EXPECT_EQ(printed(c), printed(RunConfig{}));
}

TEST(ConfigTest, ParsesValues) {
  const RunConfig c = parse_config(
      "[run]\ntrajectory = fast\nseed = 7\niterations = 3\n"
      "[learning]\ngain_fraction = 0.5\nuse_parameters = false\n"
      "fixed_gain = 0.8\n"
      "[gp]\nsharing = per_output\nlength_scales = 10 2 3\n"
      "[arm]\njoint_damping = 0.5\ngravity = 0 -9.81\n");
  EXPECT_EQ(c.trajectory, "fast");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.learning.max_iterations, 3);
  EXPECT_EQ(c.learning.gain_fraction, 0.5);
  EXPECT_FALSE(c.learning.use_parameters);
  ASSERT_TRUE(c.learning.fixed_gain.has_value());
  EXPECT_EQ(*c.learning.fixed_gain, 0.8);
  EXPECT_EQ(c.learning.gp.initial.length_scales,
            (std::vector<double>{10.0, 2.0, 3.0}));
  EXPECT_EQ(c.arm.joint_damping, 0.5);
  EXPECT_EQ(c.arm.gravity[1], -9.81);
}

TEST(ConfigTest, PrintParseRoundTrip) {
  RunConfig c = parse_config(
      "[run]\nseed = 42\n[trajectory]\nslow_amplitude = 1.1 -0.7\n"
      "[learning]\nfixed_gain = 0.3\nwindow_seconds = 1.5\n"
      "[simulation]\nmeasurement_noise = 0.001\n");
  const std::string text = printed(c);
  const RunConfig again = parse_config(text);
  EXPECT_EQ(printed(again), text);
  EXPECT_EQ(again.seed, 42u);
  EXPECT_EQ(again.slow.amplitude[1], -0.7);
  EXPECT_EQ(*again.learning.fixed_gain, 0.3);
}

TEST(ConfigTest, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse_config("[learning]\ngain_fractoin = 0.5\n"), InvalidInput);
  EXPECT_THROW(parse_config("[nowhere]\nx = 1\n"), InvalidInput);
  EXPECT_THROW(parse_config("x = 1\n"), InvalidInput);
}

TEST(ConfigTest, RejectsBadValues) {
  EXPECT_THROW(parse_config("[run]\nseed = many\n"), InvalidInput);
  EXPECT_THROW(parse_config("[run]\nsample_rate = 0\n"), InvalidInput);
  EXPECT_THROW(parse_config("[run]\ntrajectory = sideways\n"), InvalidInput);
  EXPECT_THROW(parse_config("[run]\ntrajectory = custom:\n"), InvalidInput);
  EXPECT_THROW(parse_config("[run]\nplant = lti:\n"), InvalidInput);
  EXPECT_THROW(parse_config("[learning]\ngain_fraction = 2\n"), InvalidInput);
  EXPECT_THROW(parse_config("[learning]\nuse_parameters = maybe\n"), InvalidInput);
  EXPECT_THROW(parse_config("[gp]\nsharing = everything\n"), InvalidInput);
  EXPECT_THROW(parse_config("[arm]\ngravity = 1\n"), InvalidInput);
  EXPECT_THROW(parse_config("[arm]\nspring_stiffness = -1\n"), InvalidInput);
  EXPECT_THROW(parse_config("[simulation]\ndt = 0\n"), InvalidInput);
}

TEST(ConfigTest, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "iml_config_test.ini";
  std::ofstream(path) << "[run]\niterations = 4\n";
  EXPECT_EQ(load_config(path).learning.max_iterations, 4);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), InvalidInput);
}

TEST(ConfigTest, ReferenceSelection) {
  RunConfig c;
  EXPECT_EQ(reference_trajectory(c).size(), 1251u);
  c.trajectory = "fast";
  EXPECT_EQ(reference_trajectory(c).size(), 651u);
  const auto path = std::filesystem::temp_directory_path() / "iml_custom_traj.csv";
  std::ofstream(path) << "t,y1,y2\n0,0,0\n0.01,0.1,0.2\n0.02,0.2,0.4\n";
  c.trajectory = "custom:" + path.string();
  const TimeSeries y = reference_trajectory(c);
  EXPECT_EQ(y.size(), 3u);
  EXPECT_EQ(y.channel(1)[2], 0.4);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace iml
