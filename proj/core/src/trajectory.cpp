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
#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "iml/error.hpp"
#include "iml/harness.hpp"

namespace iml {

TrajectorySpec TrajectorySpec::slow() { return {}; }

TrajectorySpec TrajectorySpec::fast() {
  TrajectorySpec s;
  s.kind = TrajectoryKind::fast_short_range;
  s.amplitude = {std::numbers::pi / 2.0, std::numbers::pi / 2.0};
  s.duration = 4.0;
  return s;
}

ProfilePoint sinusoidal_profile(double t, double amplitude, double duration) {
  if (!(duration > 0.0)) {
    throw InvalidInput("sinusoidal_profile: duration must be positive");
  }
  if (t <= 0.0) return {};
  if (t >= duration) return {amplitude, 0.0, 0.0};
  const double w = 2.0 * std::numbers::pi / duration;
  const double peak = amplitude * w / duration;  // A = 2 pi amplitude / T^2
  ProfilePoint p;
  p.acceleration = peak * std::sin(w * t);
  p.velocity = amplitude / duration * (1.0 - std::cos(w * t));
  p.position = amplitude * (t / duration - std::sin(w * t) / (2.0 * std::numbers::pi));
  return p;
}

TimeSeries generate_trajectory(const TrajectorySpec& spec, double sample_rate) {
  if (!(spec.duration > 0.0)) {
    throw InvalidInput("generate_trajectory: duration must be positive");
  }
  if (!(sample_rate > 0.0) || spec.lead_in < 0.0 || spec.tail < 0.0) {
    throw InvalidInput("generate_trajectory: invalid sample rate or holds");
  }
  if (spec.start.size() != spec.amplitude.size() || spec.start.empty()) {
    throw InvalidInput("generate_trajectory: start/amplitude size mismatch");
  }
  const double total = spec.lead_in + spec.duration + spec.tail;
  const auto n = static_cast<std::size_t>(std::llround(total * sample_rate)) + 1;
  TimeSeries ts(sample_rate);
  for (std::size_t j = 0; j < spec.start.size(); ++j) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / sample_rate - spec.lead_in;
      x[k] = spec.start[j] +
             sinusoidal_profile(t, spec.amplitude[j], spec.duration).position;
    }
    ts.add_channel(fmt::format("y{}", j + 1), std::move(x));
  }
  return ts;
}

TimeSeries generate_seed_trajectory(const TimeSeries& y_d,
                                    const SeedOptions& options) {
  if (y_d.channel_count() == 0 || y_d.size() == 0) {
    throw InvalidInput("generate_seed_trajectory: empty reference");
  }
  if (!(options.quantum > 0.0) || !(options.window_seconds > 0.0) ||
      options.settle_seconds < 0.0) {
    throw InvalidInput("generate_seed_trajectory: invalid options");
  }
  const std::size_t joints = y_d.channel_count();
  std::vector<std::vector<double>> levels(joints);
  for (std::size_t j = 0; j < joints; ++j) {
    for (double v : y_d.channel(j)) {
      const double q = quantize(v, options.quantum);
      if (levels[j].empty() || levels[j].back() != q) levels[j].push_back(q);
    }
  }
  std::vector<std::vector<double>> poses;
  std::vector<double> pose(joints);
  for (std::size_t j = 0; j < joints; ++j) pose[j] = levels[j].front();
  poses.push_back(pose);
  std::size_t steps = 0;
  for (const auto& l : levels) steps = std::max(steps, l.size());
  for (std::size_t s = 1; s < steps; ++s) {
    for (std::size_t j = 0; j < joints; ++j) {
      if (s < levels[j].size()) {
        pose[j] = levels[j][s];
        poses.push_back(pose);
      }
    }
  }
  const double fs = y_d.sample_rate();
  const auto hold = static_cast<std::size_t>(std::llround(
      (options.window_seconds + options.settle_seconds) * fs));
  std::vector<std::vector<double>> channels(joints);
  for (const auto& p : poses) {
    for (std::size_t j = 0; j < joints; ++j) {
      channels[j].insert(channels[j].end(), std::max<std::size_t>(hold, 1),
                         p[j]);
    }
  }
  TimeSeries out(fs, y_d.start_time());
  for (std::size_t j = 0; j < joints; ++j) {
    out.add_channel(fmt::format("u{}", j + 1), std::move(channels[j]));
  }
  return out;
}

}  // namespace iml
