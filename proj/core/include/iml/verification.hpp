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
// Monte-Carlo checks of the convergence lemmas.

#ifndef IML_VERIFICATION_HPP_
#define IML_VERIFICATION_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace iml {

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  // Largest value of the suite's checked quantity (radius, error or ratio).
  double worst = 0.0;
  double seconds = 0.0;

  bool passed() const noexcept { return trials > 0 && violations == 0; }
};

// Per-trial generators are seeded from the master seed and the trial index.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

// Perfect model with rho = 1: radius <= 1e-10.
SuiteResult verify_perfect_model(std::uint64_t seed, std::size_t trials = 1000);
// Perturbed model, every channel feasible, rho uniform inside the Gershgorin
// bound: radius < 1.
SuiteResult verify_gershgorin_bound(std::uint64_t seed,
                                    std::size_t trials = 1000);
// 1x1 Gershgorin bound versus the scalar bound on a 100 x 100 grid of
// (delta_m, delta_p); worst is the largest absolute difference.
SuiteResult verify_scalar_consistency(double tolerance = 1e-12);
// Worst-case bound never above the bound of the realized error matrix, and
// 0.6 x worst-case gain contracts.
SuiteResult verify_bounded_uncertainty(std::uint64_t seed,
                                       std::size_t trials = 1000);

std::vector<SuiteResult> verify_lemmas(std::uint64_t seed,
                                       std::size_t trials = 1000);

void print_suites(const std::vector<SuiteResult>& suites, std::ostream& out);

}  // namespace iml

#endif  // IML_VERIFICATION_HPP_
