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
#include "iml/hyperparameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "iml/error.hpp"
#include "iml/log.hpp"

namespace iml {
namespace {

constexpr double kInfeasible = 1e300;

// Maps between KernelParams and the packed log-parameter vector
//   per_entry:  [log sf2_j, log l_j1..l_jd]_{j=1..p}, log noise
//   per_output: [log sf2, log l_1..l_d], log noise
class Packing {
 public:
  Packing(std::size_t n_inputs, std::size_t dim, HyperparameterSharing sharing,
          const HyperparameterBounds& bounds)
      : n_inputs_(n_inputs), dim_(dim), sharing_(sharing) {
    const std::size_t blocks =
        sharing == HyperparameterSharing::per_entry ? n_inputs : 1;
    for (std::size_t b = 0; b < blocks; ++b) {
      lower_.push_back(std::log(bounds.signal_variance.lower));
      upper_.push_back(std::log(bounds.signal_variance.upper));
      for (std::size_t d = 0; d < dim; ++d) {
        lower_.push_back(std::log(bounds.length_scales[d].lower));
        upper_.push_back(std::log(bounds.length_scales[d].upper));
      }
    }
    lower_.push_back(std::log(bounds.noise_variance.lower));
    upper_.push_back(std::log(bounds.noise_variance.upper));
  }

  std::size_t size() const { return lower_.size(); }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }

  std::vector<double> pack(const std::vector<KernelParams>& params) const {
    std::vector<double> z;
    const std::size_t blocks =
        sharing_ == HyperparameterSharing::per_entry ? n_inputs_ : 1;
    for (std::size_t b = 0; b < blocks; ++b) {
      z.push_back(std::log(params[b].signal_variance));
      for (std::size_t d = 0; d < dim_; ++d) {
        z.push_back(std::log(params[b].length_scales[d]));
      }
    }
    z.push_back(std::log(std::max(params.front().noise_variance, 1e-300)));
    return clip(z);
  }

  std::vector<KernelParams> unpack(const std::vector<double>& z) const {
    std::vector<KernelParams> params(n_inputs_);
    const double noise = std::exp(z.back());
    for (std::size_t j = 0; j < n_inputs_; ++j) {
      const std::size_t b =
          sharing_ == HyperparameterSharing::per_entry ? j : 0;
      const std::size_t offset = b * (dim_ + 1);
      params[j].signal_variance = std::exp(z[offset]);
      params[j].length_scales.resize(dim_);
      for (std::size_t d = 0; d < dim_; ++d) {
        params[j].length_scales[d] = std::exp(z[offset + 1 + d]);
      }
      params[j].noise_variance = noise;
    }
    return params;
  }

  std::vector<double> clip(std::vector<double> z) const {
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = std::clamp(z[i], lower_[i], upper_[i]);
    }
    return z;
  }

  // Squared distance outside the box.
  double violation(const std::vector<double>& z) const {
    double v = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] < lower_[i]) v += (lower_[i] - z[i]) * (lower_[i] - z[i]);
      if (z[i] > upper_[i]) v += (z[i] - upper_[i]) * (z[i] - upper_[i]);
    }
    return v;
  }

 private:
  std::size_t n_inputs_;
  std::size_t dim_;
  HyperparameterSharing sharing_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct Objective {
  std::span<const TrainingPoint> points;
  const Packing* packing;
  int evaluations = 0;
};

double negative_lml(const gsl_vector* v, void* data) {
  auto* obj = static_cast<Objective*>(data);
  ++obj->evaluations;
  std::vector<double> z(v->size);
  for (std::size_t i = 0; i < v->size; ++i) z[i] = gsl_vector_get(v, i);
  const double penalty = obj->packing->violation(z);
  const auto params = obj->packing->unpack(obj->packing->clip(z));
  const double lml = log_marginal_likelihood(obj->points, params);
  if (!std::isfinite(lml)) return kInfeasible;
  return -lml + 1e3 * penalty;
}

std::vector<TrainingPoint> subsample(std::span<const TrainingPoint> points,
                                     std::size_t max_points) {
  if (max_points == 0 || points.size() <= max_points) {
    return {points.begin(), points.end()};
  }
  std::vector<TrainingPoint> out;
  out.reserve(max_points);
  const double stride =
      static_cast<double>(points.size()) / static_cast<double>(max_points);
  for (std::size_t i = 0; i < max_points; ++i) {
    out.push_back(points[static_cast<std::size_t>(
        std::floor(static_cast<double>(i) * stride))]);
  }
  return out;
}

}  // namespace

void HyperparameterBounds::validate(std::size_t location_dim) const {
  auto check = [](const Interval& i, const char* what) {
    if (!(i.lower > 0.0) || !(i.upper >= i.lower) || !std::isfinite(i.upper)) {
      throw InvalidInput(std::string("HyperparameterBounds: invalid ") + what);
    }
  };
  check(signal_variance, "signal_variance");
  check(noise_variance, "noise_variance");
  if (length_scales.size() != location_dim) {
    throw InvalidInput("HyperparameterBounds: length scale bound count");
  }
  for (const auto& i : length_scales) check(i, "length scale");
}

double log_marginal_likelihood(std::span<const TrainingPoint> points,
                               std::span<const KernelParams> per_input) {
  if (points.empty()) return 0.0;
  try {
    GpRow row({per_input.begin(), per_input.end()});
    row.set_points({points.begin(), points.end()});
    row.train();
    return row.log_marginal_likelihood();
  } catch (const NumericalError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

FitResult fit_hyperparameters(std::span<const TrainingPoint> points,
                              const std::vector<KernelParams>& init,
                              const HyperparameterBounds& bounds,
                              const FitOptions& options) {
  if (points.size() < 2) {
    throw InvalidInput("fit_hyperparameters: need at least two points");
  }
  if (init.empty()) throw InvalidInput("fit_hyperparameters: empty init");
  for (const auto& p : init) p.validate();
  const std::size_t dim = points.front().location.size();
  bounds.validate(dim);
  if (init.front().length_scales.size() != dim) {
    throw InvalidInput("fit_hyperparameters: init dimension mismatch");
  }
  if (options.starts < 1 || options.max_evaluations_per_start < 1) {
    throw InvalidInput("fit_hyperparameters: need at least one start");
  }

  const auto data = subsample(points, options.max_points);
  const Packing packing(init.size(), dim, options.sharing, bounds);
  Objective objective{data, &packing, 0};

  FitResult result;
  result.params = init;
  result.initial_log_likelihood = log_marginal_likelihood(data, init);
  result.log_likelihood = result.initial_log_likelihood;

  std::mt19937_64 rng(options.seed);
  const std::size_t n = packing.size();
  gsl_multimin_function fn{&negative_lml, n, &objective};
  gsl_multimin_fminimizer* minimizer =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);

  for (int start = 0; start < options.starts; ++start) {
    std::vector<double> z0;
    if (start == 0) {
      z0 = packing.pack(init);
    } else {
      z0.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_real_distribution<double> dist(packing.lower(i),
                                                    packing.upper(i));
        z0[i] = dist(rng);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      gsl_vector_set(x, i, z0[i]);
      gsl_vector_set(step, i,
                     std::max(0.1, 0.1 * (packing.upper(i) - packing.lower(i))));
    }
    gsl_multimin_fminimizer_set(minimizer, &fn, x, step);
    const int budget = objective.evaluations + options.max_evaluations_per_start;
    while (objective.evaluations < budget) {
      if (gsl_multimin_fminimizer_iterate(minimizer) != GSL_SUCCESS) break;
      const double size = gsl_multimin_fminimizer_size(minimizer);
      if (gsl_multimin_test_size(size, options.simplex_tolerance) ==
          GSL_SUCCESS) {
        break;
      }
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = gsl_vector_get(gsl_multimin_fminimizer_x(minimizer), i);
    }
    const auto candidate = packing.unpack(packing.clip(z));
    const double lml = log_marginal_likelihood(data, candidate);
    if (std::isfinite(lml) && lml > result.log_likelihood) {
      result.log_likelihood = lml;
      result.params = candidate;
      result.improved = true;
    }
  }
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(minimizer);
  result.evaluations = objective.evaluations;
  if (!result.improved) {
    logger()->warn("fit_hyperparameters: no start improved on the initial "
                   "hyperparameters (log likelihood {})",
                   result.initial_log_likelihood);
  }
  return result;
}

FitResult fit_hyperparameters(std::span<const TrainingPoint> points,
                              const KernelParams& init,
                              const HyperparameterBounds& bounds,
                              const FitOptions& options) {
  return fit_hyperparameters(points, std::vector<KernelParams>{init}, bounds,
                             options);
}

}  // namespace iml
