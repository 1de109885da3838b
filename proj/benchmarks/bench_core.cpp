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
#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "iml/cgpr.hpp"
#include "iml/plant.hpp"
#include "iml/signals.hpp"

namespace {

std::vector<iml::TrainingPoint> points(std::size_t n, std::size_t inputs) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<iml::TrainingPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<iml::Complex> w;
    for (std::size_t j = 0; j < inputs; ++j) w.emplace_back(d(rng), d(rng));
    pts.push_back({{u(rng), u(rng), u(rng)}, w, {d(rng), d(rng)}});
  }
  return pts;
}

const iml::KernelParams kParams{1.0, {2.0, 1.0, 1.0}, 1e-2};

void BM_Covariance(benchmark::State& state) {
  const auto pts = points(static_cast<std::size_t>(state.range(0)), 2);
  const std::vector<iml::KernelParams> params(2, kParams);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iml::build_covariance(pts, params));
  }
}
BENCHMARK(BM_Covariance)->Arg(100)->Arg(250)->Arg(500);

void BM_Train(benchmark::State& state) {
  const auto pts = points(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    iml::GpRow row(std::vector<iml::KernelParams>(2, kParams));
    row.set_points(pts);
    row.train();
    benchmark::DoNotOptimize(row.log_marginal_likelihood());
  }
}
BENCHMARK(BM_Train)->Arg(100)->Arg(250)->Arg(500);

void BM_Predict(benchmark::State& state) {
  iml::GpRow row(std::vector<iml::KernelParams>(2, kParams));
  row.set_points(points(500, 2));
  row.train();
  std::vector<std::vector<double>> locs;
  for (int k = 0; k < state.range(0); ++k) locs.push_back({0.1 * k, 1.0, 2.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(row.predict_entry(0, locs));
  }
}
BENCHMARK(BM_Predict)->Arg(64)->Arg(512);

void BM_ForwardTransform(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = d(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iml::forward_transform(x, 100.0));
  }
}
BENCHMARK(BM_ForwardTransform)->Arg(1251)->Arg(4096)->Arg(32768);

void BM_SeaArm(benchmark::State& state) {
  iml::SeaArm arm;
  const std::size_t n = 1000;
  iml::TimeSeries u(100.0);
  u.add_channel("u1", std::vector<double>(n, 0.3));
  u.add_channel("u2", std::vector<double>(n, -0.2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(arm.execute(u));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SeaArm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
