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
#include "iml/cgpr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "iml/error.hpp"
#include "iml/log.hpp"

namespace iml {
namespace {

void check_weights(const TrainingPoint& p, std::size_t n_inputs) {
  if (p.weights.size() != n_inputs) {
    throw InvalidInput("cgpr: point carries " +
                       std::to_string(p.weights.size()) +
                       " input weights, expected " + std::to_string(n_inputs));
  }
}

// Row-major n x n_inputs matrix of input weights.
Eigen::MatrixXcd weight_matrix(std::span<const TrainingPoint> points,
                               std::size_t n_inputs) {
  Eigen::MatrixXcd w(static_cast<Eigen::Index>(points.size()),
                     static_cast<Eigen::Index>(n_inputs));
  for (std::size_t r = 0; r < points.size(); ++r) {
    check_weights(points[r], n_inputs);
    for (std::size_t j = 0; j < n_inputs; ++j) {
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          points[r].weights[j];
    }
  }
  return w;
}

// Inverse squared length scales, validated against the location dimension.
std::vector<double> precisions(const KernelParams& params, std::size_t dim) {
  if (params.length_scales.size() != dim) {
    throw InvalidInput("kernel_eval: location has dimension " +
                       std::to_string(dim) + " but " +
                       std::to_string(params.length_scales.size()) +
                       " length scales were given");
  }
  std::vector<double> out(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    out[d] = 1.0 / (params.length_scales[d] * params.length_scales[d]);
  }
  return out;
}

inline double se_kernel(const double* a, const double* b,
                        const std::vector<double>& prec, double variance) {
  double s = 0.0;
  for (std::size_t d = 0; d < prec.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff * prec[d];
  }
  return variance * std::exp(-0.5 * s);
}

double condition_number(const Eigen::MatrixXcd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(k,
                                                      Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  const double lo = ev.cwiseAbs().minCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

void KernelParams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw InvalidInput("KernelParams: signal_variance must be positive");
  }
  if (length_scales.empty()) {
    throw InvalidInput("KernelParams: no length scales");
  }
  for (double l : length_scales) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw InvalidInput("KernelParams: length scales must be positive");
    }
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidInput("KernelParams: noise_variance must be nonnegative");
  }
}

double kernel_eval(std::span<const double> x1, std::span<const double> x2,
                   const KernelParams& params) {
  if (x1.size() != x2.size()) {
    throw InvalidInput("kernel_eval: location dimensions differ");
  }
  const auto prec = precisions(params, x1.size());
  return se_kernel(x1.data(), x2.data(), prec, params.signal_variance);
}

Complex weighted_kernel_eval(const TrainingPoint& p1, const TrainingPoint& p2,
                             std::span<const KernelParams> per_input) {
  check_weights(p1, per_input.size());
  check_weights(p2, per_input.size());
  Complex acc = 0.0;
  for (std::size_t j = 0; j < per_input.size(); ++j) {
    acc += p1.weights[j] * kernel_eval(p1.location, p2.location, per_input[j]) *
           std::conj(p2.weights[j]);
  }
  return acc;
}

Eigen::MatrixXcd build_covariance(std::span<const TrainingPoint> points,
                                  std::span<const KernelParams> per_input) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw InvalidInput("build_covariance: no points");
  const std::size_t dim = points.front().location.size();
  for (const auto& p : points) {
    if (p.location.size() != dim) {
      throw InvalidInput("build_covariance: inconsistent location dimension");
    }
  }
  const Eigen::MatrixXcd w = weight_matrix(points, per_input.size());
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < per_input.size(); ++j) {
    const auto prec = precisions(per_input[j], dim);
    const double variance = per_input[j].signal_variance;
    const auto jj = static_cast<Eigen::Index>(j);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double* xr = points[static_cast<std::size_t>(r)].location.data();
      const Complex ur = w(r, jj);
      if (ur == 0.0) continue;
      k(r, r) += std::norm(ur) * variance;
      for (Eigen::Index s = r + 1; s < n; ++s) {
        const Complex us = w(s, jj);
        if (us == 0.0) continue;
        const double base = se_kernel(
            xr, points[static_cast<std::size_t>(s)].location.data(), prec,
            variance);
        k(r, s) += ur * base * std::conj(us);
      }
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!std::isfinite(k(r, r).real())) {
      throw NumericalError("build_covariance: non-finite kernel value");
    }
    k(r, r) = Complex(k(r, r).real(), 0.0);
    for (Eigen::Index s = r + 1; s < n; ++s) {
      if (!std::isfinite(k(r, s).real()) || !std::isfinite(k(r, s).imag())) {
        throw NumericalError("build_covariance: non-finite kernel value");
      }
      k(s, r) = std::conj(k(r, s));
    }
  }
  return k;
}

GpRow::GpRow(std::vector<KernelParams> per_input) {
  set_hyperparameters(std::move(per_input));
}

void GpRow::set_hyperparameters(std::vector<KernelParams> per_input) {
  if (per_input.empty()) {
    throw InvalidInput("GpRow: need kernel parameters for at least one input");
  }
  for (const auto& p : per_input) p.validate();
  params_ = std::move(per_input);
  trained_ = false;
}

double GpRow::noise_variance() const {
  if (params_.empty()) throw StateError("GpRow: hyperparameters not set");
  return params_.front().noise_variance;
}

void GpRow::set_points(std::vector<TrainingPoint> points) {
  points_ = std::move(points);
  trained_ = false;
}

void GpRow::add_points(std::span<const TrainingPoint> points) {
  points_.insert(points_.end(), points.begin(), points.end());
  trained_ = false;
}

void GpRow::train() {
  if (params_.empty()) throw StateError("GpRow: hyperparameters not set");
  jitter_ = 0.0;
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (n == 0) {
    alpha_.resize(0);
    log_det_ = 0.0;
    quad_ = 0.0;
    trained_ = true;
    return;
  }
  Eigen::MatrixXcd k = build_covariance(points_, params_);
  k.diagonal().array() += noise_variance();
  Eigen::VectorXcd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    y(r) = points_[static_cast<std::size_t>(r)].target;
  }

  factor_.compute(k);
  if (factor_.info() != Eigen::Success) {
    const double base = k.diagonal().real().sum() / static_cast<double>(n);
    double jitter = 1e-10 * base;
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt, jitter *= 10.0) {
      Eigen::MatrixXcd kj = k;
      kj.diagonal().array() += jitter;
      factor_.compute(kj);
      if (factor_.info() == Eigen::Success) {
        jitter_ = jitter;
        ok = true;
      }
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "GpRow::train: covariance not positive definite (condition number "
          << condition_number(k) << ")";
      throw NumericalError(msg.str());
    }
    logger()->debug("GpRow::train: added jitter {}", jitter_);
  }
  alpha_ = factor_.solve(y);
  log_det_ = 2.0 * factor_.matrixLLT().diagonal().real().array().log().sum();
  quad_ = y.dot(alpha_).real();
  if (!std::isfinite(log_det_) || !std::isfinite(quad_)) {
    throw NumericalError("GpRow::train: non-finite factorization");
  }
  trained_ = true;
}

double GpRow::log_marginal_likelihood() const {
  require_trained();
  return -quad_ - log_det_ -
         static_cast<double>(points_.size()) * std::log(std::numbers::pi);
}

void GpRow::require_trained() const {
  if (!trained_) throw StateError("GpRow: model is not trained");
}

Prediction GpRow::predict(std::span<const std::vector<double>> locations,
                          std::span<const Complex> test_weights) const {
  require_trained();
  if (test_weights.size() != params_.size()) {
    throw InvalidInput("GpRow::predict: test weight count mismatch");
  }
  const auto n = static_cast<Eigen::Index>(points_.size());
  const auto m = static_cast<Eigen::Index>(locations.size());

  double prior = 0.0;
  for (std::size_t j = 0; j < params_.size(); ++j) {
    prior += std::norm(test_weights[j]) * params_[j].signal_variance;
  }
  Prediction out;
  out.mean.assign(locations.size(), Complex(0.0));
  out.variance.assign(locations.size(), prior);
  if (n == 0 || m == 0) return out;

  const std::size_t dim = points_.front().location.size();
  for (const auto& x : locations) {
    if (x.size() != dim) {
      throw InvalidInput("GpRow::predict: location dimension mismatch");
    }
  }
  // c(r, s) = sum_j U_jr k_j(x_r, x*_s) conj(w_j)
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, m);
  for (std::size_t j = 0; j < params_.size(); ++j) {
    if (test_weights[j] == 0.0) continue;
    const auto prec = precisions(params_[j], dim);
    const Complex wj = std::conj(test_weights[j]);
    for (Eigen::Index s = 0; s < m; ++s) {
      const double* xs = locations[static_cast<std::size_t>(s)].data();
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto& p = points_[static_cast<std::size_t>(r)];
        const Complex ur = p.weights[j];
        if (ur == 0.0) continue;
        c(r, s) += ur * se_kernel(p.location.data(), xs, prec,
                                  params_[j].signal_variance) *
                   wj;
      }
    }
  }
  const Eigen::VectorXcd mean = c.adjoint() * alpha_;
  factor_.matrixL().solveInPlace(c);
  const Eigen::VectorXd reduction = c.colwise().squaredNorm().transpose();
  for (Eigen::Index s = 0; s < m; ++s) {
    out.mean[static_cast<std::size_t>(s)] = mean(s);
    out.variance[static_cast<std::size_t>(s)] =
        std::max(0.0, prior - reduction(s));
  }
  return out;
}

Prediction GpRow::predict_entry(
    std::size_t input, std::span<const std::vector<double>> locations) const {
  if (input >= params_.size()) {
    throw InvalidInput("GpRow::predict_entry: input index out of range");
  }
  std::vector<Complex> w(params_.size(), Complex(0.0));
  w[input] = 1.0;
  return predict(locations, w);
}

MimoGp::MimoGp(std::size_t n_outputs, std::size_t n_inputs,
               std::size_t location_dim)
    : n_inputs_(n_inputs), location_dim_(location_dim) {
  if (n_outputs == 0 || n_inputs == 0 || location_dim == 0) {
    throw InvalidInput("MimoGp: dimensions must be positive");
  }
  KernelParams defaults;
  defaults.length_scales.assign(location_dim, 1.0);
  rows_.assign(n_outputs, GpRow(std::vector<KernelParams>(n_inputs, defaults)));
}

void MimoGp::train() {
  for (auto& r : rows_) r.train();
}

bool MimoGp::trained() const noexcept {
  return !rows_.empty() &&
         std::all_of(rows_.begin(), rows_.end(),
                     [](const GpRow& r) { return r.trained(); });
}

std::size_t MimoGp::total_points() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.points().size();
  return n;
}

ModelEstimate MimoGp::estimate(std::span<const double> params,
                               std::span<const double> frequencies) const {
  if (params.size() + 1 != location_dim_) {
    throw InvalidInput("MimoGp::estimate: expected " +
                       std::to_string(location_dim_ - 1) + " parameters");
  }
  std::vector<std::vector<double>> locations(frequencies.size());
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    locations[k].reserve(location_dim_);
    locations[k].push_back(frequencies[k]);
    locations[k].insert(locations[k].end(), params.begin(), params.end());
  }
  ModelEstimate est;
  est.frequencies.assign(frequencies.begin(), frequencies.end());
  const auto no = static_cast<Eigen::Index>(rows_.size());
  const auto ni = static_cast<Eigen::Index>(n_inputs_);
  est.mean.assign(frequencies.size(), Eigen::MatrixXcd::Zero(no, ni));
  est.variance.assign(frequencies.size(), Eigen::MatrixXd::Zero(no, ni));
  for (Eigen::Index i = 0; i < no; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      const auto pred = rows_[static_cast<std::size_t>(i)].predict_entry(
          static_cast<std::size_t>(j), locations);
      for (std::size_t k = 0; k < frequencies.size(); ++k) {
        est.mean[k](i, j) = pred.mean[k];
        est.variance[k](i, j) = pred.variance[k];
      }
    }
  }
  return est;
}

std::vector<TrainingPoint> samples_from_spectra(
    std::span<const Spectrum> inputs, const Spectrum& output,
    const Window& window, std::span<const std::size_t> kept_indices) {
  for (const auto& u : inputs) {
    if (u.size() != output.size()) {
      throw InvalidInput("samples_from_spectra: spectra lengths differ");
    }
  }
  std::vector<TrainingPoint> points;
  points.reserve(kept_indices.size());
  for (std::size_t k : kept_indices) {
    if (k >= output.size()) {
      throw InvalidInput("samples_from_spectra: kept index out of range");
    }
    TrainingPoint p;
    p.location.reserve(1 + window.representative_params.size());
    p.location.push_back(output.frequencies()[k]);
    p.location.insert(p.location.end(), window.representative_params.begin(),
                      window.representative_params.end());
    p.weights.reserve(inputs.size());
    for (const auto& u : inputs) p.weights.push_back(u[k]);
    p.target = output[k];
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace iml
