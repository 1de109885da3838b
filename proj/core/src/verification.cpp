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
#include "iml/verification.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "iml/convergence.hpp"

namespace iml {
namespace {

using Clock = std::chrono::steady_clock;
constexpr int kMaxAttempts = 1000;

Eigen::MatrixXcd random_complex(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXcd m(2, 2);
  for (Eigen::Index i = 0; i < 4; ++i) m(i) = Complex(n(rng), n(rng));
  return m;
}

double condition(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                               : std::numeric_limits<double>::infinity();
}

bool all_feasible(const GainResult& g) { return g.feasible_count() == g.size(); }

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SuiteResult verify_perfect_model(std::uint64_t seed, std::size_t trials) {
  const auto t0 = Clock::now();
  SuiteResult r{"perfect model, rho = 1: radius <= 1e-10"};
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    Eigen::MatrixXcd g = random_complex(rng, 1.0);
    for (int a = 0; a < kMaxAttempts && condition(g) > 1e4; ++a) {
      g = random_complex(rng, 1.0);
    }
    const double radius = iteration_map_spectral_radius(
        g, g.inverse(), Eigen::VectorXd::Ones(2));
    r.worst = std::max(r.worst, radius);
    if (!(radius <= 1e-10)) ++r.violations;
    ++r.trials;
  }
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_gershgorin_bound(std::uint64_t seed, std::size_t trials) {
  const auto t0 = Clock::now();
  SuiteResult r{"perturbed model, rho inside the Gershgorin bound: radius < 1"};
  std::uniform_real_distribution<double> unit(1e-9, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    for (int a = 0; a < kMaxAttempts; ++a) {
      const Eigen::MatrixXcd g = random_complex(rng, 1.0);
      if (condition(g) > 1e3) continue;
      const Eigen::MatrixXcd g_hat = g + random_complex(rng, 0.1);
      if (condition(g_hat) > 1e3) continue;
      const Eigen::MatrixXcd g_hat_inv = g_hat.inverse();
      const GainResult bound = mimo_gain_bound(g_hat_inv * g);
      if (!all_feasible(bound)) continue;
      Eigen::VectorXd rho(2);
      for (Eigen::Index i = 0; i < 2; ++i) rho(i) = unit(rng) * bound.bound(i);
      const double radius = iteration_map_spectral_radius(g, g_hat_inv, rho);
      r.worst = std::max(r.worst, radius);
      if (!(radius < 1.0)) ++r.violations;
      ++r.trials;
      break;
    }
  }
  if (r.trials < trials) r.violations += trials - r.trials;
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_scalar_consistency(double tolerance) {
  const auto t0 = Clock::now();
  SuiteResult r{"1x1 Gershgorin bound equals the scalar bound"};
  constexpr int kGrid = 100;
  for (int a = 0; a < kGrid; ++a) {
    const double m = 0.1 + (10.0 - 0.1) * a / (kGrid - 1);
    for (int b = 0; b < kGrid; ++b) {
      const double p =
          -std::numbers::pi + 2.0 * std::numbers::pi * b / (kGrid - 1);
      const GainResult scalar = scalar_gain_bound(m, p);
      Eigen::MatrixXcd delta(1, 1);
      delta(0, 0) = std::polar(m, p);
      const GainResult mimo = mimo_gain_bound(delta);
      const double diff = std::max(std::abs(scalar.bound(0) - mimo.bound(0)),
                                   std::abs(scalar.rho(0) - mimo.rho(0)));
      r.worst = std::max(r.worst, diff);
      if (scalar.feasible[0] != mimo.feasible[0] || !(diff <= tolerance)) {
        ++r.violations;
      }
      ++r.trials;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_bounded_uncertainty(std::uint64_t seed, std::size_t trials) {
  const auto t0 = Clock::now();
  SuiteResult r{"worst-case bound <= realized bound, 0.6 x worst case contracts"};
  std::uniform_real_distribution<double> box(0.0, 0.05);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    const bool corners = t % 2 == 1;
    for (int a = 0; a < kMaxAttempts; ++a) {
      const Eigen::MatrixXcd g_hat =
          Eigen::MatrixXcd::Identity(2, 2) + random_complex(rng, 0.3);
      if (condition(g_hat) > 1e3) continue;
      ModelErrorBounds bounds;
      bounds.delta_a.resize(2, 2);
      bounds.delta_b.resize(2, 2);
      Eigen::MatrixXcd g = g_hat;
      for (Eigen::Index i = 0; i < 4; ++i) {
        bounds.delta_a(i) = box(rng);
        bounds.delta_b(i) = box(rng);
        const double sa = corners ? (coin(rng) ? 1.0 : -1.0) : sym(rng);
        const double sb = corners ? (coin(rng) ? 1.0 : -1.0) : sym(rng);
        g(i) += Complex(sa * bounds.delta_a(i), sb * bounds.delta_b(i));
      }
      const GainResult worst = bounded_uncertainty_gain(g_hat, bounds, 0.6);
      if (!all_feasible(worst)) continue;
      const Eigen::MatrixXcd g_hat_inv = g_hat.inverse();
      const GainResult realized = mimo_gain_bound(g_hat_inv * g);
      bool ok = all_feasible(realized);
      for (Eigen::Index i = 0; ok && i < 2; ++i) {
        ok = worst.bound(i) <= realized.bound(i) * (1.0 + 1e-12);
        r.worst = std::max(r.worst, worst.bound(i) / realized.bound(i));
      }
      const double radius = iteration_map_spectral_radius(g, g_hat_inv, worst.rho);
      if (!ok || !(radius < 1.0)) ++r.violations;
      ++r.trials;
      break;
    }
  }
  if (r.trials < trials) r.violations += trials - r.trials;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<SuiteResult> verify_lemmas(std::uint64_t seed, std::size_t trials) {
  return {verify_perfect_model(seed, trials),
          verify_gershgorin_bound(seed + 1, trials),
          verify_scalar_consistency(),
          verify_bounded_uncertainty(seed + 2, trials)};
}

void print_suites(const std::vector<SuiteResult>& suites, std::ostream& out) {
  for (const auto& s : suites) {
    out << fmt::format("{} {} ({} trials, {} violations, worst {:.6g}, {:.2f} s)\n",
                       s.passed() ? "PASS" : "FAIL", s.name, s.trials,
                       s.violations, s.worst, s.seconds);
  }
}

}  // namespace iml
