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
// Frequency-domain iterative learning with a learned, parameter-varying
// transfer-matrix model. Each iteration the input is corrected as
//
//   u_k(t_j) = u_{k-1}(t_j) + IDFT(rho Ghat_j^-1 DFT(y_d - y_{k-1}))(t_j)
//
// where Ghat_j is the local model at the quantized parameters of sample t_j.

#ifndef IML_ILC_HPP_
#define IML_ILC_HPP_

#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iml/cgpr.hpp"
#include "iml/convergence.hpp"
#include "iml/hyperparameters.hpp"
#include "iml/plant.hpp"
#include "iml/signals.hpp"

namespace iml {

struct GpSettings {
  // Length scales are ordered (omega, p_1..p_m) and must match the location
  // dimension.
  KernelParams initial{1.0, {20.0, 1.0, 1.0}, 1e-3};
  HyperparameterBounds bounds{
      {1e-3, 1e3}, {{1.0, 500.0}, {0.05, 20.0}, {0.05, 20.0}}, {1e-8, 1.0}};
  FitOptions fit{.max_points = 250};
  // Hyperparameters are refit after iterations 0..refit_until_iteration - 1
  // (and after the seeding run); negative refits every iteration.
  int refit_until_iteration = -1;
  // Cumulative training set cap per output row; 0 keeps everything.
  std::size_t max_training_points = 1000;
};

struct LearningConfig {
  double param_quantum = std::numbers::pi / 10.0;
  double window_seconds = 2.0;
  double threshold_fraction = 0.5;
  double gain_fraction = 0.6;
  double sigma_multiple = 2.0;
  int max_iterations = 20;
  // rad/s; nonpositive selects a quarter of the Nyquist frequency.
  double frequency_cutoff = 0.0;
  // When false the model has no parameter dimensions (LTI).
  bool use_parameters = true;
  // Overrides the uncertainty-based gain with rho = fixed_gain * I.
  std::optional<double> fixed_gain;
  // Model evaluation points on [0, cutoff], interpolated onto the DFT bins of
  // the horizon; 0 evaluates every bin.
  std::size_t estimation_grid_points = 64;
  bool stop_on_convergence = false;
  double stall_tolerance = 1e-4;
  int stall_iterations = 3;
  // max_abs_error at or below this counts as converged.
  double error_tolerance = 1e-9;
  GpSettings gp;

  void validate() const;
  double cutoff(double sample_rate) const;
};

struct IterationRecord {
  int index = 0;
  TimeSeries u;
  TimeSeries y;
  TimeSeries e;
  std::vector<double> max_abs_error;
  std::vector<double> rms_error;
  std::string model_snapshot_ref;
  std::size_t training_points = 0;
  // Over every updated (parameter combination, frequency, channel).
  double feasible_fraction = 0.0;
  double mean_rho = 0.0;
  std::vector<std::vector<KernelParams>> hyperparameters;
  std::vector<GainDiagnostic> gains;
  bool saturated = false;
  bool fault = false;
  std::string message;

  double max_error() const;
};

// Nearest multiple of quantum, ties away from zero.
double quantize(double x, double quantum);
TimeSeries quantize_params(const TimeSeries& params, double quantum);

// Training points per output row.
struct TrainingUpdate {
  std::vector<std::vector<TrainingPoint>> rows;
  std::size_t windows = 0;

  std::size_t size() const noexcept;
};

// Windows start at every change of the quantized params; inputs and outputs
// are first-differenced over the whole record and each window segment is
// transformed. For output i the kept bins are those passing the magnitude
// threshold against any nonzero input, limited to the frequency cutoff.
// params may have no channels, in which case the record is one window.
TrainingUpdate build_training_update(const TimeSeries& u, const TimeSeries& y,
                                     const TimeSeries& params,
                                     const LearningConfig& config);

class TransferModel {
 public:
  virtual ~TransferModel() = default;
  virtual std::size_t n_outputs() const = 0;
  virtual std::size_t n_inputs() const = 0;
  virtual ModelEstimate estimate(std::span<const double> params,
                                 std::span<const double> frequencies) const = 0;
};

class GpTransferModel final : public TransferModel {
 public:
  explicit GpTransferModel(const MimoGp& gp) : gp_(&gp) {}
  std::size_t n_outputs() const override { return gp_->n_outputs(); }
  std::size_t n_inputs() const override { return gp_->n_inputs(); }
  ModelEstimate estimate(std::span<const double> params,
                         std::span<const double> frequencies) const override {
    return gp_->estimate(params, frequencies);
  }

 private:
  const MimoGp* gp_;
};

// Known response with a constant per-entry variance.
class AnalyticTransferModel final : public TransferModel {
 public:
  using Response =
      std::function<Eigen::MatrixXcd(double, std::span<const double>)>;

  AnalyticTransferModel(std::size_t n_outputs, std::size_t n_inputs,
                        Response response, double variance = 0.0);

  std::size_t n_outputs() const override { return n_outputs_; }
  std::size_t n_inputs() const override { return n_inputs_; }
  ModelEstimate estimate(std::span<const double> params,
                         std::span<const double> frequencies) const override;

 private:
  std::size_t n_outputs_;
  std::size_t n_inputs_;
  Response response_;
  double variance_;
};

// Local model at one parameter vector with per-frequency inverses. A
// frequency whose estimate cannot be inverted is marked not invertible.
struct LocalModel {
  ModelEstimate estimate;
  std::vector<Eigen::MatrixXcd> inverse;
  std::vector<bool> invertible;
};

LocalModel local_model(const TransferModel& model,
                       std::span<const double> params,
                       std::span<const double> frequencies);

// Reference response used only for the spectral-radius column of the gain
// diagnostics.
using ReferenceResponse = std::function<std::optional<Eigen::MatrixXcd>(
    double, std::span<const double>)>;

struct UpdateDiagnostics {
  std::vector<GainDiagnostic> gains;
  std::size_t updated = 0;
  std::size_t feasible = 0;
  double rho_sum = 0.0;
  std::size_t combinations = 0;
};

// Per-frequency correction rho Ghat^-1 E for one local model. Bins above the
// cutoff, infeasible channels and non-invertible frequencies contribute
// exactly zero.
std::vector<Spectrum> correction_spectrum(std::span<const Spectrum> error,
                                          const LocalModel& local,
                                          std::span<const double> params,
                                          const LearningConfig& config,
                                          double cutoff,
                                          UpdateDiagnostics* diagnostics,
                                          const ReferenceResponse& reference);

// One learning update. params supplies the scheduling parameters per sample
// (quantized here); with no channels a single model covers the horizon.
TimeSeries update_input(const TimeSeries& u_prev, const TimeSeries& e_prev,
                        const TimeSeries& params, const TransferModel& model,
                        const LearningConfig& config,
                        UpdateDiagnostics* diagnostics = nullptr,
                        const ReferenceResponse& reference = {});

// Least-squares DC gain from the held levels of a piecewise-constant input:
// increments of the mean input and output over the second half of each hold.
// Returns nullopt when the increments do not span every input direction.
std::optional<Eigen::MatrixXd> estimate_dc_gain(const TimeSeries& u,
                                                const TimeSeries& y);

struct LearningHooks {
  std::function<void(const IterationRecord&)> on_seed;
  // Called once per iteration after the model used for the next update has
  // been trained (model is null for a fixed model).
  std::function<void(IterationRecord&, const MimoGp*)> on_iteration;
  ReferenceResponse reference;
};

struct LearningResult {
  std::optional<IterationRecord> seed;
  std::vector<IterationRecord> iterations;
  Eigen::MatrixXd dc_gain;
  MimoGp model;
  bool converged = false;
  int converged_at = -1;
  bool faulted = false;
  std::string fault_message;
};

// Runs the seeding trajectory (when no fixed model is given), then
// u_0 = G_0^-1 y_d and max_iterations learning updates. With a fixed model
// the model is never retrained and G_0 is its DC value at the initial
// parameters.
LearningResult run_learning(Plant& plant, const TimeSeries& y_d,
                            const LearningConfig& config,
                            const TimeSeries* seed_input = nullptr,
                            const TransferModel* fixed_model = nullptr,
                            const LearningHooks& hooks = {});

}  // namespace iml

#endif  // IML_ILC_HPP_
