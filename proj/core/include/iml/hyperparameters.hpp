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
#ifndef IML_HYPERPARAMETERS_HPP_
#define IML_HYPERPARAMETERS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iml/cgpr.hpp"

namespace iml {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Box constraints applied to every entry kernel of a row.
struct HyperparameterBounds {
  Interval signal_variance{1e-4, 1e4};
  std::vector<Interval> length_scales;
  Interval noise_variance{1e-8, 1e2};

  void validate(std::size_t location_dim) const;
};

// per_entry: every transfer-matrix entry G_ij has its own (sigma_f, l).
// per_output: all entries of a row share one (sigma_f, l).
enum class HyperparameterSharing { per_entry, per_output };

struct FitOptions {
  int starts = 4;
  std::uint64_t seed = 0x5eed;
  int max_evaluations_per_start = 200;
  // Stop a start once the simplex characteristic size (log space) is below.
  double simplex_tolerance = 1e-3;
  HyperparameterSharing sharing = HyperparameterSharing::per_entry;
  // Deterministic stride subsample above this size; 0 keeps every point.
  std::size_t max_points = 0;
};

struct FitResult {
  std::vector<KernelParams> params;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;
  // False when no start improved on init; params then equal init.
  bool improved = false;
  int evaluations = 0;
};

// Log marginal likelihood of points under the row kernel, or -infinity when
// the covariance cannot be factorized.
double log_marginal_likelihood(std::span<const TrainingPoint> points,
                               std::span<const KernelParams> per_input);

// Maximizes the log marginal likelihood over log-parameters with a
// multi-start Nelder-Mead simplex inside bounds. Start 0 is init (clipped to
// the bounds); the remaining starts are drawn uniformly in log space from a
// generator seeded with options.seed. The noise variance is shared by the row.
FitResult fit_hyperparameters(std::span<const TrainingPoint> points,
                              const std::vector<KernelParams>& init,
                              const HyperparameterBounds& bounds,
                              const FitOptions& options = {});

FitResult fit_hyperparameters(std::span<const TrainingPoint> points,
                              const KernelParams& init,
                              const HyperparameterBounds& bounds,
                              const FitOptions& options = {});

}  // namespace iml

#endif  // IML_HYPERPARAMETERS_HPP_
