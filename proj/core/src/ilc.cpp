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
#include "iml/ilc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "iml/error.hpp"
#include "iml/log.hpp"

namespace iml {
namespace {

bool nonzero(const Spectrum& s) {
  return std::any_of(s.values().begin(), s.values().end(),
                     [](Complex v) { return v != Complex(0.0); });
}

std::vector<double> slice(const std::vector<double>& x, const Window& w) {
  return {x.begin() + static_cast<std::ptrdiff_t>(w.start_index),
          x.begin() + static_cast<std::ptrdiff_t>(w.start_index + w.length)};
}

std::vector<double> channel_copy(const TimeSeries& ts, std::size_t i) {
  const auto c = ts.channel(i);
  return {c.begin(), c.end()};
}

// Index of the last DFT bin at or below the cutoff.
std::size_t last_bin(const std::vector<double>& freqs, double cutoff) {
  std::size_t k = 0;
  while (k + 1 < freqs.size() && freqs[k + 1] <= cutoff * (1.0 + 1e-12)) ++k;
  return k;
}

ModelEstimate interpolate(const ModelEstimate& coarse,
                          std::span<const double> frequencies) {
  ModelEstimate fine;
  fine.frequencies.assign(frequencies.begin(), frequencies.end());
  const auto& grid = coarse.frequencies;
  for (double w : frequencies) {
    auto hi = std::lower_bound(grid.begin(), grid.end(), w);
    std::size_t b = static_cast<std::size_t>(hi - grid.begin());
    if (b == 0) {
      fine.mean.push_back(coarse.mean.front());
      fine.variance.push_back(coarse.variance.front());
      continue;
    }
    if (b >= grid.size()) {
      fine.mean.push_back(coarse.mean.back());
      fine.variance.push_back(coarse.variance.back());
      continue;
    }
    const double t = (w - grid[b - 1]) / (grid[b] - grid[b - 1]);
    fine.mean.push_back((1.0 - t) * coarse.mean[b - 1] + t * coarse.mean[b]);
    fine.variance.push_back((1.0 - t) * coarse.variance[b - 1] +
                            t * coarse.variance[b]);
  }
  return fine;
}

LocalModel invert_estimate(ModelEstimate estimate) {
  LocalModel local;
  local.inverse.reserve(estimate.mean.size());
  for (const auto& g : estimate.mean) {
    bool ok = g.rows() == g.cols() && g.allFinite();
    Eigen::MatrixXcd inv;
    if (ok) {
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(g);
      ok = lu.isInvertible();
      if (ok) inv = lu.inverse();
      ok = ok && inv.allFinite();
    }
    local.inverse.push_back(ok ? inv : Eigen::MatrixXcd());
    local.invertible.push_back(ok);
  }
  local.estimate = std::move(estimate);
  return local;
}

// Matches the location dimension of the kernel settings to the model.
GpSettings adapt_settings(GpSettings s, std::size_t location_dim) {
  auto resize = [location_dim](auto& v) {
    if (v.size() == location_dim) return;
    const auto first = v.front();
    const auto param = v.size() > 1 ? v[1] : first;
    v.assign(location_dim, param);
    v[0] = first;
  };
  if (s.initial.length_scales.empty()) s.initial.length_scales = {1.0};
  if (s.bounds.length_scales.empty()) s.bounds.length_scales = {{0.1, 100.0}};
  resize(s.initial.length_scales);
  resize(s.bounds.length_scales);
  return s;
}

void trim(std::vector<TrainingPoint>& points, std::size_t cap) {
  if (cap == 0 || points.size() <= cap) return;
  std::vector<TrainingPoint> kept;
  kept.reserve(cap);
  const double stride =
      static_cast<double>(points.size()) / static_cast<double>(cap);
  for (std::size_t i = 0; i < cap; ++i) {
    kept.push_back(std::move(points[static_cast<std::size_t>(
        std::floor(static_cast<double>(i) * stride))]));
  }
  points = std::move(kept);
}

TimeSeries named(double fs, double start, const char* prefix,
                 std::vector<std::vector<double>> channels) {
  TimeSeries ts(fs, start);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    ts.add_channel(fmt::format("{}{}", prefix, i + 1), std::move(channels[i]));
  }
  return ts;
}

}  // namespace

void LearningConfig::validate() const {
  auto ratio = [](double v, const char* what) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw InvalidInput(fmt::format("LearningConfig: {} must be in (0, 1]",
                                     what));
    }
  };
  ratio(threshold_fraction, "threshold_fraction");
  ratio(gain_fraction, "gain_fraction");
  if (!(param_quantum > 0.0)) {
    throw InvalidInput("LearningConfig: param_quantum must be positive");
  }
  if (!(window_seconds > 0.0)) {
    throw InvalidInput("LearningConfig: window_seconds must be positive");
  }
  if (!(sigma_multiple > 0.0)) {
    throw InvalidInput("LearningConfig: sigma_multiple must be positive");
  }
  if (max_iterations < 0) {
    throw InvalidInput("LearningConfig: max_iterations must be >= 0");
  }
  if (fixed_gain && !(*fixed_gain > 0.0 && std::isfinite(*fixed_gain))) {
    throw InvalidInput("LearningConfig: fixed_gain must be positive");
  }
  if (stall_iterations < 1 || !(stall_tolerance >= 0.0) ||
      !(error_tolerance >= 0.0)) {
    throw InvalidInput("LearningConfig: invalid convergence settings");
  }
  if (estimation_grid_points == 1) {
    throw InvalidInput("LearningConfig: estimation_grid_points must be 0 or >= 2");
  }
  gp.initial.validate();
}

double LearningConfig::cutoff(double sample_rate) const {
  return frequency_cutoff > 0.0
             ? frequency_cutoff
             : 0.25 * std::numbers::pi * sample_rate;  // Nyquist / 4
}

double IterationRecord::max_error() const {
  double m = 0.0;
  for (double v : max_abs_error) m = std::max(m, v);
  return m;
}

double quantize(double x, double quantum) {
  return quantum * std::round(x / quantum);
}

TimeSeries quantize_params(const TimeSeries& params, double quantum) {
  if (!(quantum > 0.0)) {
    throw InvalidInput("quantize_params: quantum must be positive");
  }
  TimeSeries out(params.sample_rate(), params.start_time());
  for (std::size_t i = 0; i < params.channel_count(); ++i) {
    std::vector<double> q = channel_copy(params, i);
    for (double& v : q) v = quantize(v, quantum);
    out.add_channel(params.name(i), std::move(q));
  }
  return out;
}

std::size_t TrainingUpdate::size() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

TrainingUpdate build_training_update(const TimeSeries& u, const TimeSeries& y,
                                     const TimeSeries& params,
                                     const LearningConfig& config) {
  if (u.size() != y.size() || u.size() < 2 ||
      u.sample_rate() != y.sample_rate()) {
    throw InvalidInput("build_training_update: u and y must be aligned");
  }
  if (params.channel_count() > 0 && params.size() != u.size()) {
    throw InvalidInput("build_training_update: params not aligned with u");
  }
  const double fs = u.sample_rate();
  const double cutoff = config.cutoff(fs);
  const TimeSeries q = quantize_params(params, config.param_quantum);
  TimeSeries q_data(fs, u.start_time());
  for (std::size_t i = 0; i < q.channel_count(); ++i) {
    q_data.add_channel(q.name(i), channel_copy(q, i));
  }
  const auto windows = extract_windows(u, q_data, config.window_seconds);

  std::vector<std::vector<double>> du;
  std::vector<std::vector<double>> dy;
  for (std::size_t j = 0; j < u.channel_count(); ++j) {
    du.push_back(first_difference(u.channel(j)));
  }
  for (std::size_t i = 0; i < y.channel_count(); ++i) {
    dy.push_back(first_difference(y.channel(i)));
  }

  TrainingUpdate update;
  update.rows.resize(y.channel_count());
  update.windows = windows.size();
  for (const auto& w : windows) {
    std::vector<Spectrum> inputs;
    for (const auto& d : du) inputs.push_back(forward_transform(slice(d, w), fs));
    for (std::size_t i = 0; i < dy.size(); ++i) {
      const Spectrum out = forward_transform(slice(dy[i], w), fs);
      if (!nonzero(out)) continue;
      std::vector<std::size_t> kept;
      for (const auto& in : inputs) {
        if (!nonzero(in)) continue;
        for (std::size_t k :
             threshold_spectra(in, out, config.threshold_fraction)) {
          if (out.frequencies()[k] <= cutoff) kept.push_back(k);
        }
      }
      std::sort(kept.begin(), kept.end());
      kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
      auto points = samples_from_spectra(inputs, out, w, kept);
      update.rows[i].insert(update.rows[i].end(),
                            std::make_move_iterator(points.begin()),
                            std::make_move_iterator(points.end()));
    }
  }
  return update;
}

AnalyticTransferModel::AnalyticTransferModel(std::size_t n_outputs,
                                             std::size_t n_inputs,
                                             Response response,
                                             double variance)
    : n_outputs_(n_outputs),
      n_inputs_(n_inputs),
      response_(std::move(response)),
      variance_(variance) {
  if (!response_ || !(variance_ >= 0.0)) {
    throw InvalidInput("AnalyticTransferModel: invalid response or variance");
  }
}

ModelEstimate AnalyticTransferModel::estimate(
    std::span<const double> params, std::span<const double> frequencies) const {
  ModelEstimate e;
  e.frequencies.assign(frequencies.begin(), frequencies.end());
  for (double w : frequencies) {
    Eigen::MatrixXcd g = response_(w, params);
    if (static_cast<std::size_t>(g.rows()) != n_outputs_ ||
        static_cast<std::size_t>(g.cols()) != n_inputs_) {
      throw InvalidInput("AnalyticTransferModel: response has wrong shape");
    }
    e.mean.push_back(std::move(g));
    e.variance.push_back(
        Eigen::MatrixXd::Constant(n_outputs_, n_inputs_, variance_));
  }
  return e;
}

LocalModel local_model(const TransferModel& model,
                       std::span<const double> params,
                       std::span<const double> frequencies) {
  return invert_estimate(model.estimate(params, frequencies));
}

std::vector<Spectrum> correction_spectrum(std::span<const Spectrum> error,
                                          const LocalModel& local,
                                          std::span<const double> params,
                                          const LearningConfig& config,
                                          double cutoff,
                                          UpdateDiagnostics* diagnostics,
                                          const ReferenceResponse& reference) {
  if (error.empty()) throw InvalidInput("correction_spectrum: no error channels");
  const auto& freqs = error.front().frequencies();
  const std::size_t n_out = error.size();
  const std::size_t n_in = local.estimate.n_inputs();
  std::vector<std::vector<Complex>> values(
      n_in, std::vector<Complex>(freqs.size(), Complex(0.0)));
  const std::size_t n_model = local.estimate.n_frequencies();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t k = 0; k < freqs.size() && freqs[k] <= cutoff * (1 + 1e-12);
       ++k) {
    if (k >= n_model) {
      throw InvalidInput("correction_spectrum: model grid shorter than cutoff");
    }
    GainResult gains;
    gains.rho = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_in));
    gains.bound = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_in));
    gains.feasible.assign(n_in, false);
    if (local.invertible[k]) {
      if (config.fixed_gain) {
        gains.rho.setConstant(*config.fixed_gain);
        gains.bound.setConstant(nan);
        gains.feasible.assign(n_in, true);
      } else {
        try {
          gains = bounded_uncertainty_gain(
              local.estimate.mean[k],
              variance_to_bounds(local.estimate.variance[k],
                                 config.sigma_multiple),
              config.gain_fraction);
        } catch (const NumericalError&) {
        }
      }
      Eigen::VectorXcd e(static_cast<Eigen::Index>(n_out));
      for (std::size_t i = 0; i < n_out; ++i) e(i) = error[i][k];
      const Eigen::VectorXcd c =
          gains.rho.cast<Complex>().asDiagonal() * (local.inverse[k] * e);
      for (std::size_t j = 0; j < n_in; ++j) {
        if (gains.feasible[j]) values[j][k] = c(j);
      }
    }
    if (diagnostics != nullptr) {
      double radius = nan;
      if (reference && local.invertible[k]) {
        if (auto g = reference(freqs[k], params)) {
          radius = iteration_map_spectral_radius(*g, local.inverse[k],
                                                 gains.rho);
        }
      }
      for (std::size_t j = 0; j < n_in; ++j) {
        diagnostics->gains.push_back({freqs[k], j, gains.bound(j),
                                      gains.rho(j), gains.feasible[j],
                                      radius});
        diagnostics->rho_sum += gains.rho(j);
      }
      diagnostics->updated += n_in;
      diagnostics->feasible += gains.feasible_count();
    }
  }
  std::vector<Spectrum> out;
  for (auto& v : values) out.emplace_back(freqs, std::move(v));
  return out;
}

TimeSeries update_input(const TimeSeries& u_prev, const TimeSeries& e_prev,
                        const TimeSeries& params, const TransferModel& model,
                        const LearningConfig& config,
                        UpdateDiagnostics* diagnostics,
                        const ReferenceResponse& reference) {
  const std::size_t n = u_prev.size();
  if (e_prev.size() != n || n < 2 ||
      u_prev.sample_rate() != e_prev.sample_rate()) {
    throw InvalidInput("update_input: u_prev and e_prev must be aligned");
  }
  if (u_prev.channel_count() != model.n_inputs() ||
      e_prev.channel_count() != model.n_outputs()) {
    throw InvalidInput("update_input: channel counts do not match the model");
  }
  const bool scheduled = config.use_parameters && params.channel_count() > 0;
  if (scheduled && params.size() != n) {
    throw InvalidInput("update_input: params not aligned with u_prev");
  }
  const double fs = u_prev.sample_rate();
  const double cutoff = config.cutoff(fs);

  std::vector<Spectrum> error;
  for (std::size_t i = 0; i < e_prev.channel_count(); ++i) {
    error.push_back(forward_transform(e_prev.channel(i), fs));
  }
  const auto& freqs = error.front().frequencies();
  const std::size_t kmax = last_bin(freqs, cutoff);
  const std::vector<double> model_freqs(freqs.begin(),
                                        freqs.begin() + kmax + 1);
  std::vector<double> grid;
  const std::size_t points = config.estimation_grid_points;
  if (points != 0 && points < model_freqs.size()) {
    for (std::size_t p = 0; p < points; ++p) {
      grid.push_back(model_freqs.back() * static_cast<double>(p) /
                     static_cast<double>(points - 1));
    }
  }

  std::map<std::vector<double>, std::vector<std::size_t>> combos;
  if (scheduled) {
    const TimeSeries q = quantize_params(params, config.param_quantum);
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<double> key(q.channel_count());
      for (std::size_t c = 0; c < key.size(); ++c) key[c] = q.channel(c)[t];
      combos[key].push_back(t);
    }
  } else {
    auto& all = combos[{}];
    all.resize(n);
    for (std::size_t t = 0; t < n; ++t) all[t] = t;
  }

  std::vector<std::vector<double>> u_next;
  for (std::size_t j = 0; j < u_prev.channel_count(); ++j) {
    u_next.push_back(channel_copy(u_prev, j));
  }
  for (const auto& [key, indices] : combos) {
    ModelEstimate estimate =
        grid.empty() ? model.estimate(key, model_freqs)
                     : interpolate(model.estimate(key, grid), model_freqs);
    const LocalModel local = invert_estimate(std::move(estimate));
    const auto correction = correction_spectrum(error, local, key, config,
                                                cutoff, diagnostics, reference);
    for (std::size_t j = 0; j < correction.size(); ++j) {
      if (!nonzero(correction[j])) continue;
      const auto du = inverse_transform(correction[j], n, fs);
      for (std::size_t t : indices) u_next[j][t] += du[t];
    }
    if (diagnostics != nullptr) ++diagnostics->combinations;
  }
  TimeSeries out(fs, u_prev.start_time());
  for (std::size_t j = 0; j < u_next.size(); ++j) {
    out.add_channel(u_prev.name(j), std::move(u_next[j]));
  }
  return out;
}

std::optional<Eigen::MatrixXd> estimate_dc_gain(const TimeSeries& u,
                                                const TimeSeries& y) {
  if (u.size() != y.size() || u.size() < 2) {
    throw InvalidInput("estimate_dc_gain: u and y must be aligned");
  }
  const std::size_t n = u.size();
  std::vector<std::size_t> starts{0};
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < u.channel_count(); ++j) {
      if (u.channel(j)[t] != u.channel(j)[t - 1]) {
        starts.push_back(t);
        break;
      }
    }
  }
  starts.push_back(n);
  const auto n_in = static_cast<Eigen::Index>(u.channel_count());
  const auto n_out = static_cast<Eigen::Index>(y.channel_count());
  std::vector<Eigen::VectorXd> u_levels;
  std::vector<Eigen::VectorXd> y_levels;
  for (std::size_t s = 0; s + 1 < starts.size(); ++s) {
    const std::size_t begin = (starts[s] + starts[s + 1]) / 2;
    const std::size_t end = starts[s + 1];
    if (end <= begin) continue;
    Eigen::VectorXd um = Eigen::VectorXd::Zero(n_in);
    Eigen::VectorXd ym = Eigen::VectorXd::Zero(n_out);
    for (std::size_t t = begin; t < end; ++t) {
      for (Eigen::Index j = 0; j < n_in; ++j) um(j) += u.channel(j)[t];
      for (Eigen::Index i = 0; i < n_out; ++i) ym(i) += y.channel(i)[t];
    }
    u_levels.push_back(um / static_cast<double>(end - begin));
    y_levels.push_back(ym / static_cast<double>(end - begin));
  }
  if (u_levels.size() < 2) return std::nullopt;
  const auto m = static_cast<Eigen::Index>(u_levels.size() - 1);
  Eigen::MatrixXd du(n_in, m);
  Eigen::MatrixXd dy(n_out, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    du.col(c) = u_levels[c + 1] - u_levels[c];
    dy.col(c) = y_levels[c + 1] - y_levels[c];
  }
  const Eigen::MatrixXd gram = du * du.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || eig.eigenvalues().minCoeff() <= 1e-10 * top) {
    return std::nullopt;
  }
  return Eigen::MatrixXd(dy * du.transpose() * gram.inverse());
}

LearningResult run_learning(Plant& plant, const TimeSeries& y_d,
                            const LearningConfig& config,
                            const TimeSeries* seed_input,
                            const TransferModel* fixed_model,
                            const LearningHooks& hooks) {
  config.validate();
  const std::size_t n_out = plant.n_outputs();
  const std::size_t n_in = plant.n_inputs();
  if (y_d.channel_count() != n_out || y_d.size() < 2) {
    throw InvalidInput("run_learning: reference must have one channel per "
                       "plant output");
  }
  if (n_in != n_out) {
    throw InvalidInput("run_learning: the plant must be square");
  }
  const double fs = y_d.sample_rate();
  const std::size_t n = y_d.size();
  const TimeSeries no_params(fs, y_d.start_time());
  const TimeSeries& params = config.use_parameters ? y_d : no_params;
  const std::size_t location_dim =
      1 + (config.use_parameters ? y_d.channel_count() : 0);
  const GpSettings gp = adapt_settings(config.gp, location_dim);

  LearningResult result;
  result.model = MimoGp(n_out, n_in, location_dim);
  for (std::size_t i = 0; i < n_out; ++i) {
    result.model.row(i).set_hyperparameters(
        std::vector<KernelParams>(n_in, gp.initial));
  }
  const GpTransferModel gp_model(result.model);
  const TransferModel& model =
      fixed_model != nullptr ? *fixed_model : gp_model;
  const MimoGp* learned = fixed_model != nullptr ? nullptr : &result.model;

  auto make_record = [&](int index, const TimeSeries& u, PlantRun run,
                         const TimeSeries& target) {
    IterationRecord rec;
    rec.index = index;
    rec.u = u;
    rec.saturated = run.saturated;
    rec.fault = run.fault;
    rec.message = run.message;
    const std::size_t m = run.output.size();
    std::vector<std::vector<double>> e(n_out, std::vector<double>(m));
    for (std::size_t i = 0; i < n_out; ++i) {
      double max_abs = 0.0;
      double sq = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        e[i][t] = target.channel(i)[t] - run.output.channel(i)[t];
        max_abs = std::max(max_abs, std::abs(e[i][t]));
        sq += e[i][t] * e[i][t];
      }
      rec.max_abs_error.push_back(max_abs);
      rec.rms_error.push_back(m > 0 ? std::sqrt(sq / static_cast<double>(m))
                                    : 0.0);
    }
    rec.y = std::move(run.output);
    rec.e = named(fs, y_d.start_time(), "e", std::move(e));
    return rec;
  };

  auto learn = [&](const TimeSeries& u, const TimeSeries& y,
                   const TimeSeries& p, bool refit) {
    const TrainingUpdate update = build_training_update(u, y, p, config);
    for (std::size_t i = 0; i < n_out; ++i) {
      GpRow& row = result.model.row(i);
      row.add_points(update.rows[i]);
      if (gp.max_training_points != 0 &&
          row.points().size() > gp.max_training_points) {
        auto pts = row.points();
        trim(pts, gp.max_training_points);
        row.set_points(std::move(pts));
      }
      if (refit && row.points().size() >= 2) {
        const FitResult fit = fit_hyperparameters(
            row.points(), row.hyperparameters(), gp.bounds, gp.fit);
        row.set_hyperparameters(fit.params);
      }
      row.train();
    }
  };

  auto current_hyperparameters = [&]() {
    std::vector<std::vector<KernelParams>> h;
    if (learned == nullptr) return h;
    for (std::size_t i = 0; i < n_out; ++i) {
      h.push_back(result.model.row(i).hyperparameters());
    }
    return h;
  };

  std::vector<double> start_params;
  if (config.use_parameters) {
    for (std::size_t c = 0; c < y_d.channel_count(); ++c) {
      start_params.push_back(quantize(y_d.channel(c)[0], config.param_quantum));
    }
  }

  if (fixed_model == nullptr) {
    if (seed_input == nullptr) {
      throw InvalidInput("run_learning: a seed trajectory is needed to learn "
                         "a model");
    }
    if (seed_input->channel_count() != n_in || seed_input->size() < 2) {
      throw InvalidInput("run_learning: seed input has the wrong shape");
    }
    PlantRun run = plant.execute(*seed_input);
    const TimeSeries seed_y = run.output;
    IterationRecord seed = make_record(-1, *seed_input, std::move(run),
                                       *seed_input);
    if (seed.fault) {
      result.faulted = true;
      result.fault_message = seed.message;
      if (hooks.on_seed) hooks.on_seed(seed);
      result.seed = std::move(seed);
      return result;
    }
    const TimeSeries seed_params(fs, seed_input->start_time());
    learn(*seed_input, seed_y,
          config.use_parameters ? *seed_input : seed_params, true);
    seed.training_points = result.model.total_points();
    seed.hyperparameters = current_hyperparameters();
    if (auto g0 = estimate_dc_gain(*seed_input, seed_y)) {
      result.dc_gain = *g0;
    } else {
      logger()->warn("run_learning: seed run does not excite every input; "
                     "using the model DC value as G0");
      const double zero = 0.0;
      result.dc_gain =
          model.estimate(start_params, std::span(&zero, 1)).mean[0].real();
    }
    if (hooks.on_seed) hooks.on_seed(seed);
    result.seed = std::move(seed);
  } else {
    const double zero = 0.0;
    result.dc_gain =
        model.estimate(start_params, std::span(&zero, 1)).mean[0].real();
  }

  Eigen::FullPivLU<Eigen::MatrixXd> g0_lu(result.dc_gain);
  if (!g0_lu.isInvertible()) {
    throw NumericalError("run_learning: DC gain estimate is singular");
  }
  const Eigen::MatrixXd g0_inv = g0_lu.inverse();
  std::vector<std::vector<double>> u0(n_in, std::vector<double>(n));
  for (std::size_t t = 0; t < n; ++t) {
    Eigen::VectorXd yd(static_cast<Eigen::Index>(n_out));
    for (std::size_t i = 0; i < n_out; ++i) yd(i) = y_d.channel(i)[t];
    const Eigen::VectorXd v = g0_inv * yd;
    for (std::size_t j = 0; j < n_in; ++j) u0[j][t] = v(j);
  }
  TimeSeries u = named(fs, y_d.start_time(), "u", std::move(u0));

  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int k = 0; k <= config.max_iterations; ++k) {
    IterationRecord rec = make_record(k, u, plant.execute(u), y_d);
    rec.training_points = result.model.total_points();
    rec.hyperparameters = current_hyperparameters();
    if (rec.fault) {
      result.faulted = true;
      result.fault_message = rec.message;
      if (hooks.on_iteration) hooks.on_iteration(rec, learned);
      result.iterations.push_back(std::move(rec));
      break;
    }
    const double err = rec.max_error();
    if (err <= config.error_tolerance) {
      if (!result.converged) result.converged_at = k;
      result.converged = true;
    }
    if (err > best - config.stall_tolerance) {
      ++stalled;
    } else {
      stalled = 0;
    }
    best = std::min(best, err);
    if (stalled >= config.stall_iterations) {
      if (!result.converged) result.converged_at = k;
      result.converged = true;
    }
    const bool last = k == config.max_iterations ||
                      (result.converged && config.stop_on_convergence);
    if (!last) {
      if (learned != nullptr) {
        const bool refit =
            gp.refit_until_iteration < 0 || k < gp.refit_until_iteration;
        learn(u, rec.y, params, refit);
        rec.training_points = result.model.total_points();
        rec.hyperparameters = current_hyperparameters();
      }
      UpdateDiagnostics diag;
      u = update_input(u, rec.e, params, model, config, &diag,
                       hooks.reference);
      rec.gains = std::move(diag.gains);
      rec.feasible_fraction =
          diag.updated > 0 ? static_cast<double>(diag.feasible) /
                                 static_cast<double>(diag.updated)
                           : 0.0;
      rec.mean_rho = diag.updated > 0
                         ? diag.rho_sum / static_cast<double>(diag.updated)
                         : 0.0;
    }
    if (hooks.on_iteration) hooks.on_iteration(rec, learned);
    result.iterations.push_back(std::move(rec));
    if (last) break;
  }
  return result;
}

}  // namespace iml
