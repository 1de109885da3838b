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
// Fixed-frequency convergence tests and iteration-gain bounds for the update
//
//   U_k(w) = U_{k-1}(w) + rho(w) Ghat^-1(w) (Y_d(w) - Y_{k-1}(w)),
//
// with rho(w) = diag(rho_1, ..., rho_N) and model error Delta = Ghat^-1 G.

#ifndef IML_CONVERGENCE_HPP_
#define IML_CONVERGENCE_HPP_

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "iml/cgpr.hpp"

namespace iml {

// Entrywise bounds |Re(Ghat - G)| <= delta_a, |Im(Ghat - G)| <= delta_b.
struct ModelErrorBounds {
  Eigen::MatrixXd delta_a;
  Eigen::MatrixXd delta_b;

  void validate() const;
};

// Per-channel iteration gains. rho_i = gain_fraction * bound_i when feasible,
// otherwise rho_i = bound_i = 0.
struct GainResult {
  Eigen::VectorXd rho;
  Eigen::VectorXd bound;
  std::vector<bool> feasible;

  std::size_t size() const noexcept { return feasible.size(); }
  std::size_t feasible_count() const noexcept;
};

inline constexpr double kDefaultGainFraction = 0.6;

// max |eig(I - diag(rho) G_inv_est G)|.
double iteration_map_spectral_radius(const Eigen::MatrixXcd& G,
                                     const Eigen::MatrixXcd& G_inv_est,
                                     const Eigen::VectorXd& rho);

// Scalar case: feasible iff |delta_p| < pi/2, bound 2 cos(delta_p) / delta_m.
GainResult scalar_gain_bound(double delta_m, double delta_p,
                             double gain_fraction = kDefaultGainFraction);

// Gershgorin bound from a known error matrix Delta. With
// S_i = sum_{j != i} |Delta_ij|, channel i is feasible iff
// Re(Delta_ii) > S_i and then
//
//   bound_i = 2 (|Delta_ii| cos(arg Delta_ii) - S_i) / (|Delta_ii|^2 - S_i^2).
GainResult mimo_gain_bound(const Eigen::MatrixXcd& Delta,
                           double gain_fraction = kDefaultGainFraction);

// Worst-case bound over every G inside the entrywise boxes around G_est:
//
//   bound_i = 2 (1 - sum_k |Re r_ik| da_ki - sum_k |Im r_ik| db_ki - D_i)
//             / (|r_i|^2 |c_abs,i + da_i + j db_i|^2)
//
// where r_i is row i of G_est^-1, c_abs,i holds |Re c_ki| + j|Im c_ki| for
// column i of G_est and D_i = sum_{j != i} sum_k |r_ik| |da_kj + j db_kj|.
// Throws NumericalError when G_est is singular; warns when its condition
// number exceeds 1e8.
GainResult bounded_uncertainty_gain(const Eigen::MatrixXcd& G_est,
                                    const ModelErrorBounds& bounds,
                                    double gain_fraction = kDefaultGainFraction);

// delta_a = delta_b = sigma_multiple * sqrt(variance), elementwise.
ModelErrorBounds variance_to_bounds(const Eigen::MatrixXd& variance,
                                    double sigma_multiple = 2.0);
std::vector<ModelErrorBounds> variance_to_bounds(const ModelEstimate& estimate,
                                                 double sigma_multiple = 2.0);

// One row of the per-frequency gain dump. spectral_radius_check is the
// iteration-map radius against a reference plant, or NaN when none is known.
struct GainDiagnostic {
  double omega = 0.0;
  std::size_t channel = 0;
  double bound = 0.0;
  double rho = 0.0;
  bool feasible = false;
  double spectral_radius_check = 0.0;
};

void write_gain_diagnostics(std::ostream& out,
                            std::span<const GainDiagnostic> rows);

}  // namespace iml

#endif  // IML_CONVERGENCE_HPP_
