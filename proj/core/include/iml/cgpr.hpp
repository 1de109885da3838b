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
// Complex-valued Gaussian process regression over (frequency, parameter)
// locations with the input-weighted kernel
//
//   k'_i(x_r, x_s | U_r, U_s) = sum_j U_jr k_ij(x_r, x_s) conj(U_js),
//
// so that one output row Y_i = sum_j G_ij(x) U_j + eps can be learned from
// coupled input/output spectra. Each entry G_ij carries its own real-valued
// squared-exponential ARD kernel; targets and means are complex, variances
// are real (circular complex Gaussian).

#ifndef IML_CGPR_HPP_
#define IML_CGPR_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "iml/signals.hpp"

namespace iml {

// Squared-exponential ARD hyperparameters for one transfer-matrix entry.
// length_scales are ordered (omega, p_1, ..., p_m).
struct KernelParams {
  double signal_variance = 1.0;
  std::vector<double> length_scales;
  double noise_variance = 0.0;

  // Throws InvalidInput unless signal_variance > 0, all length scales > 0 and
  // noise_variance >= 0.
  void validate() const;
  bool operator==(const KernelParams&) const = default;
};

// One frequency-domain sample: location x = [omega, p_1..p_m], the complex
// input spectra U_1..U_p at that bin, and the output spectrum value Y_i.
struct TrainingPoint {
  std::vector<double> location;
  std::vector<Complex> weights;
  Complex target;

  bool operator==(const TrainingPoint&) const = default;
};

// Transfer-matrix estimate on a frequency grid: mean[k] and variance[k] are
// n_outputs x n_inputs for frequencies[k].
struct ModelEstimate {
  std::vector<double> frequencies;
  std::vector<Eigen::MatrixXcd> mean;
  std::vector<Eigen::MatrixXd> variance;

  std::size_t n_frequencies() const noexcept { return frequencies.size(); }
  std::size_t n_outputs() const noexcept {
    return mean.empty() ? 0 : static_cast<std::size_t>(mean.front().rows());
  }
  std::size_t n_inputs() const noexcept {
    return mean.empty() ? 0 : static_cast<std::size_t>(mean.front().cols());
  }
};

// sigma_f^2 * exp(-1/2 * sum_d ((x1_d - x2_d) / l_d)^2).
double kernel_eval(std::span<const double> x1, std::span<const double> x2,
                   const KernelParams& params);

// sum_j U_j(p1) k_j(x1, x2) conj(U_j(p2)), one kernel per plant input.
Complex weighted_kernel_eval(const TrainingPoint& p1, const TrainingPoint& p2,
                             std::span<const KernelParams> per_input);

// Noise-free covariance K' = sum_j diag(U_j) K_j diag(conj(U_j)).
Eigen::MatrixXcd build_covariance(std::span<const TrainingPoint> points,
                                  std::span<const KernelParams> per_input);

// Mean and (clamped, nonnegative) variance at a list of test locations.
struct Prediction {
  std::vector<Complex> mean;
  std::vector<double> variance;
};

// Posterior for one output row. The output noise variance of the row is
// per_input.front().noise_variance and is added as sigma^2 * I.
//
// Thread safety: set_* and train() mutate; a trained row may be queried
// concurrently.
class GpRow {
 public:
  GpRow() = default;
  explicit GpRow(std::vector<KernelParams> per_input);

  void set_hyperparameters(std::vector<KernelParams> per_input);
  const std::vector<KernelParams>& hyperparameters() const noexcept {
    return params_;
  }
  double noise_variance() const;

  void set_points(std::vector<TrainingPoint> points);
  void add_points(std::span<const TrainingPoint> points);
  const std::vector<TrainingPoint>& points() const noexcept { return points_; }

  // Factorizes K_T = K' + sigma^2 I. On failure retries with jitter
  // 1e-10 * trace / n, growing x10 up to three times, then throws
  // NumericalError reporting the condition number.
  void train();
  bool trained() const noexcept { return trained_; }
  double jitter() const noexcept { return jitter_; }

  // log p(Y) = -Y^H K_T^-1 Y - log det K_T - n log(pi).
  double log_marginal_likelihood() const;

  // Predicts sum_j f_j(x) w_j at each location for fixed test weights w.
  Prediction predict(std::span<const std::vector<double>> locations,
                     std::span<const Complex> test_weights) const;

  // Predicts the single entry f_input(x): unit weight on that input and zero
  // on the others.
  Prediction predict_entry(std::size_t input,
                           std::span<const std::vector<double>> locations) const;

 private:
  void require_trained() const;

  std::vector<KernelParams> params_;
  std::vector<TrainingPoint> points_;
  Eigen::LLT<Eigen::MatrixXcd> factor_;
  Eigen::VectorXcd alpha_;
  double log_det_ = 0.0;
  double quad_ = 0.0;
  double jitter_ = 0.0;
  bool trained_ = false;
};

// One GpRow per plant output.
class MimoGp {
 public:
  MimoGp() = default;
  MimoGp(std::size_t n_outputs, std::size_t n_inputs, std::size_t location_dim);

  std::size_t n_outputs() const noexcept { return rows_.size(); }
  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t location_dim() const noexcept { return location_dim_; }

  GpRow& row(std::size_t i) { return rows_.at(i); }
  const GpRow& row(std::size_t i) const { return rows_.at(i); }

  void train();
  bool trained() const noexcept;
  std::size_t total_points() const noexcept;

  // Entry-wise prediction of G(omega, params) for every omega in frequencies.
  ModelEstimate estimate(std::span<const double> params,
                         std::span<const double> frequencies) const;

 private:
  std::size_t n_inputs_ = 0;
  std::size_t location_dim_ = 0;
  std::vector<GpRow> rows_;
};

// Training points from one window: one point per kept bin k, located at
// [omega_k, window params], weighted by every input spectrum at k, with the
// output spectrum value as target.
std::vector<TrainingPoint> samples_from_spectra(
    std::span<const Spectrum> inputs, const Spectrum& output,
    const Window& window, std::span<const std::size_t> kept_indices);

}  // namespace iml

#endif  // IML_CGPR_HPP_
