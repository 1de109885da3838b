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
#include <sstream>

#include <gtest/gtest.h>

#include "iml/verification.hpp"

namespace iml {
namespace {

TEST(VerificationTest, SuitesPass) {
  const auto suites = verify_lemmas(11, 300);
  ASSERT_EQ(suites.size(), 4u);
  for (const auto& s : suites) {
    EXPECT_TRUE(s.passed()) << s.name << " violations " << s.violations;
    EXPECT_GT(s.trials, 0u);
  }
}

TEST(VerificationTest, PerfectModelRadiusIsTiny) {
  const SuiteResult r = verify_perfect_model(5, 200);
  EXPECT_EQ(r.trials, 200u);
  EXPECT_LE(r.worst, 1e-10);
}

TEST(VerificationTest, GershgorinRadiusBelowOne) {
  const SuiteResult r = verify_gershgorin_bound(5, 200);
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.worst, 1.0);
}

TEST(VerificationTest, ScalarConsistencyGrid) {
  const SuiteResult r = verify_scalar_consistency();
  EXPECT_EQ(r.trials, 10000u);
  EXPECT_LE(r.worst, 1e-12);
}

TEST(VerificationTest, TrialSeedsDiffer) {
  EXPECT_EQ(trial_seed(1, 2), trial_seed(1, 2));
  EXPECT_NE(trial_seed(1, 2), trial_seed(1, 3));
  EXPECT_NE(trial_seed(1, 2), trial_seed(2, 2));
}

TEST(VerificationTest, PrintsOneLinePerSuite) {
  std::ostringstream out;
  print_suites(verify_lemmas(3, 50), out);
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}

}  // namespace
}  // namespace iml
