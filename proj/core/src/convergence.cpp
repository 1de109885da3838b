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
#include "iml/convergence.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "iml/error.hpp"
#include "iml/log.hpp"

namespace iml {
namespace {

void check_fraction(double gain_fraction) {
  if (!(gain_fraction > 0.0 && gain_fraction <= 1.0)) {
    throw InvalidInput("gain_fraction must lie in (0, 1]");
  }
}

GainResult empty_result(Eigen::Index n) {
  GainResult r;
  r.rho = Eigen::VectorXd::Zero(n);
  r.bound = Eigen::VectorXd::Zero(n);
  r.feasible.assign(static_cast<std::size_t>(n), false);
  return r;
}

}  // namespace

void ModelErrorBounds::validate() const {
  if (delta_a.rows() != delta_b.rows() || delta_a.cols() != delta_b.cols()) {
    throw InvalidInput("ModelErrorBounds: delta_a and delta_b differ in shape");
  }
  if (!delta_a.allFinite() || !delta_b.allFinite() ||
      (delta_a.size() > 0 &&
       (delta_a.minCoeff() < 0.0 || delta_b.minCoeff() < 0.0))) {
    throw InvalidInput("ModelErrorBounds: bounds must be finite and >= 0");
  }
}

std::size_t GainResult::feasible_count() const noexcept {
  std::size_t n = 0;
  for (bool f : feasible) n += f ? 1 : 0;
  return n;
}

double iteration_map_spectral_radius(const Eigen::MatrixXcd& G,
                                     const Eigen::MatrixXcd& G_inv_est,
                                     const Eigen::VectorXd& rho) {
  if (G.rows() != G.cols() || G_inv_est.rows() != G_inv_est.cols() ||
      G.rows() != G_inv_est.rows() || rho.size() != G.rows()) {
    throw InvalidInput(
        "iteration_map_spectral_radius: need square matrices of equal size");
  }
  if (!rho.allFinite()) {
    throw InvalidInput("iteration_map_spectral_radius: non-finite gain");
  }
  const Eigen::Index n = G.rows();
  const Eigen::MatrixXcd map =
      Eigen::MatrixXcd::Identity(n, n) -
      rho.cast<Complex>().asDiagonal() * (G_inv_est * G);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(map, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("iteration_map_spectral_radius: eigensolver failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

GainResult scalar_gain_bound(double delta_m, double delta_p,
                             double gain_fraction) {
  if (!(delta_m > 0.0) || !std::isfinite(delta_m) || !std::isfinite(delta_p)) {
    throw InvalidInput("scalar_gain_bound: delta_m must be positive");
  }
  check_fraction(gain_fraction);
  GainResult r = empty_result(1);
  if (std::abs(delta_p) < std::numbers::pi / 2.0) {
    const double bound = 2.0 * std::cos(delta_p) / delta_m;
    if (bound > 0.0) {
      r.feasible[0] = true;
      r.bound(0) = bound;
      r.rho(0) = gain_fraction * bound;
    }
  }
  return r;
}

GainResult mimo_gain_bound(const Eigen::MatrixXcd& Delta,
                           double gain_fraction) {
  if (Delta.rows() != Delta.cols() || Delta.rows() == 0) {
    throw InvalidInput("mimo_gain_bound: Delta must be square");
  }
  check_fraction(gain_fraction);
  const Eigen::Index n = Delta.rows();
  GainResult r = empty_result(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(Delta(i, i));
    if (m == 0.0) {
      throw InvalidInput("mimo_gain_bound: zero diagonal magnitude");
    }
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) s += std::abs(Delta(i, j));
    }
    const double m_cos = m * std::cos(std::arg(Delta(i, i)));
    if (m_cos > s) {
      const double bound = 2.0 * (m_cos - s) / (m * m - s * s);
      if (std::isfinite(bound) && bound > 0.0) {
        r.feasible[i] = true;
        r.bound(i) = bound;
        r.rho(i) = gain_fraction * bound;
      }
    }
  }
  return r;
}

GainResult bounded_uncertainty_gain(const Eigen::MatrixXcd& G_est,
                                    const ModelErrorBounds& bounds,
                                    double gain_fraction) {
  if (G_est.rows() != G_est.cols() || G_est.rows() == 0) {
    throw InvalidInput("bounded_uncertainty_gain: G_est must be square");
  }
  bounds.validate();
  if (bounds.delta_a.rows() != G_est.rows() ||
      bounds.delta_a.cols() != G_est.cols()) {
    throw InvalidInput("bounded_uncertainty_gain: bounds not conformal");
  }
  check_fraction(gain_fraction);
  if (!G_est.allFinite()) {
    throw NumericalError("bounded_uncertainty_gain: non-finite model");
  }
  const Eigen::Index n = G_est.rows();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G_est);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(n - 1);
  if (!(smin > smax * std::numeric_limits<double>::epsilon() * n) ||
      smin == 0.0) {
    throw NumericalError(fmt::format(
        "bounded_uncertainty_gain: singular model (condition number {:.3g})",
        smin == 0.0 ? std::numeric_limits<double>::infinity() : smax / smin));
  }
  const double cond = smax / smin;
  if (cond > 1e8) {
    logger()->warn("bounded_uncertainty_gain: condition number {:.3g}", cond);
  }
  const Eigen::MatrixXcd R = G_est.partialPivLu().inverse();
  const Eigen::MatrixXd& da = bounds.delta_a;
  const Eigen::MatrixXd& db = bounds.delta_b;

  GainResult r = empty_result(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double numerator = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      numerator -= std::abs(R(i, k).real()) * da(k, i) +
                   std::abs(R(i, k).imag()) * db(k, i);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        numerator -= std::abs(R(i, k)) * std::hypot(da(k, j), db(k, j));
      }
    }
    if (!(numerator > 0.0)) continue;
    double c_norm2 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double re = std::abs(G_est(k, i).real()) + da(k, i);
      const double im = std::abs(G_est(k, i).imag()) + db(k, i);
      c_norm2 += re * re + im * im;
    }
    const double denominator = R.row(i).squaredNorm() * c_norm2;
    const double bound = 2.0 * numerator / denominator;
    if (std::isfinite(bound) && bound > 0.0) {
      r.feasible[i] = true;
      r.bound(i) = bound;
      r.rho(i) = gain_fraction * bound;
    }
  }
  return r;
}

ModelErrorBounds variance_to_bounds(const Eigen::MatrixXd& variance,
                                    double sigma_multiple) {
  if (!(sigma_multiple > 0.0)) {
    throw InvalidInput("variance_to_bounds: sigma_multiple must be positive");
  }
  if (variance.size() > 0 &&
      (!variance.allFinite() || variance.minCoeff() < 0.0)) {
    throw InvalidInput("variance_to_bounds: negative or non-finite variance");
  }
  ModelErrorBounds b;
  b.delta_a = sigma_multiple * variance.cwiseSqrt();
  b.delta_b = b.delta_a;
  return b;
}

std::vector<ModelErrorBounds> variance_to_bounds(const ModelEstimate& estimate,
                                                 double sigma_multiple) {
  std::vector<ModelErrorBounds> out;
  out.reserve(estimate.variance.size());
  for (const auto& v : estimate.variance) {
    out.push_back(variance_to_bounds(v, sigma_multiple));
  }
  return out;
}

void write_gain_diagnostics(std::ostream& out,
                            std::span<const GainDiagnostic> rows) {
  out << "omega,channel,bound,rho,feasible,spectral_radius_check\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.omega, r.channel, r.bound,
                       r.rho, r.feasible ? 1 : 0, r.spectral_radius_check);
  }
}

}  // namespace iml
