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
#include "iml/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "iml/error.hpp"
#include "iml/log.hpp"

namespace iml {

TimeSeries::TimeSeries(double sample_rate, double start_time)
    : sample_rate_(sample_rate), start_time_(start_time) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw InvalidInput("TimeSeries: sample_rate must be positive and finite");
  }
}

TimeSeries& TimeSeries::add_channel(std::string name,
                                    std::vector<double> samples) {
  if (samples.empty()) {
    throw InvalidInput("TimeSeries: channel '" + name + "' is empty");
  }
  if (!channels_.empty() && samples.size() != channels_.front().size()) {
    throw InvalidInput("TimeSeries: channel '" + name +
                       "' length differs from existing channels");
  }
  if (find(name)) {
    throw InvalidInput("TimeSeries: duplicate channel '" + name + "'");
  }
  names_.push_back(std::move(name));
  channels_.push_back(std::move(samples));
  return *this;
}

std::size_t TimeSeries::size() const noexcept {
  return channels_.empty() ? 0 : channels_.front().size();
}

const std::string& TimeSeries::name(std::size_t i) const {
  if (i >= names_.size()) throw InvalidInput("TimeSeries: channel index");
  return names_[i];
}

std::optional<std::size_t> TimeSeries::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> TimeSeries::channel(std::size_t i) const {
  if (i >= channels_.size()) throw InvalidInput("TimeSeries: channel index");
  return channels_[i];
}

std::span<const double> TimeSeries::channel(std::string_view name) const {
  auto i = find(name);
  if (!i) {
    throw InvalidInput("TimeSeries: no channel named '" + std::string(name) +
                       "'");
  }
  return channels_[*i];
}

std::span<double> TimeSeries::mutable_channel(std::size_t i) {
  if (i >= channels_.size()) throw InvalidInput("TimeSeries: channel index");
  return channels_[i];
}

Spectrum::Spectrum(std::vector<double> frequencies, std::vector<Complex> values)
    : frequencies_(std::move(frequencies)), values_(std::move(values)) {
  if (frequencies_.size() != values_.size()) {
    throw InvalidInput("Spectrum: frequency and value counts differ");
  }
  if (!frequencies_.empty() && !(frequencies_.front() >= 0.0)) {
    throw InvalidInput("Spectrum: frequencies must be nonnegative");
  }
  for (std::size_t k = 1; k < frequencies_.size(); ++k) {
    if (!(frequencies_[k] > frequencies_[k - 1])) {
      throw InvalidInput("Spectrum: frequencies must be strictly increasing");
    }
  }
}

std::vector<double> dft_frequencies(std::size_t n, double sample_rate) {
  std::vector<double> omega(n / 2 + 1);
  const double step =
      2.0 * std::numbers::pi * sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k < omega.size(); ++k) {
    omega[k] = step * static_cast<double>(k);
  }
  return omega;
}

Spectrum forward_transform(std::span<const double> x, double sample_rate) {
  if (x.size() < 2) {
    throw InvalidInput("forward_transform: need at least two samples");
  }
  if (!(sample_rate > 0.0)) {
    throw InvalidInput("forward_transform: sample_rate must be positive");
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> input(x.begin(), x.end());
  std::vector<Complex> half;
  fft.fwd(half, input);
  half.resize(x.size() / 2 + 1);
  return Spectrum(dft_frequencies(x.size(), sample_rate), std::move(half));
}

std::vector<double> inverse_transform(const Spectrum& s, std::size_t n_samples,
                                      double sample_rate) {
  if (n_samples < 2) {
    throw InvalidInput("inverse_transform: need at least two samples");
  }
  const auto grid = dft_frequencies(n_samples, sample_rate);
  if (s.size() != grid.size()) {
    throw InvalidInput("inverse_transform: spectrum length does not match grid");
  }
  const double tol = 1e-9 * grid.back();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::abs(s.frequencies()[k] - grid[k]) > tol) {
      throw InvalidInput("inverse_transform: frequency grid mismatch");
    }
  }
  std::vector<Complex> half = s.values();
  half.front() = Complex(half.front().real(), 0.0);
  if (n_samples % 2 == 0) half.back() = Complex(half.back().real(), 0.0);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> out(n_samples);
  fft.inv(out.data(), half.data(), static_cast<Eigen::Index>(n_samples));
  return out;
}

std::vector<double> circular_convolve(std::span<const double> x,
                                      std::span<const double> z) {
  if (x.size() != z.size()) {
    throw InvalidInput("circular_convolve: length mismatch");
  }
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += x[m] * z[(i + n - m) % n];
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> first_difference(std::span<const double> x) {
  std::vector<double> d(x.size(), 0.0);
  for (std::size_t n = 1; n < x.size(); ++n) d[n] = x[n] - x[n - 1];
  return d;
}

std::vector<Window> extract_windows(const TimeSeries& data,
                                    const TimeSeries& quantized_params,
                                    double window_seconds) {
  const std::size_t n = data.size();
  if (n == 0) throw InvalidInput("extract_windows: empty data");
  const double samples_per_window = window_seconds * data.sample_rate();
  if (!(samples_per_window >= 2.0)) {
    throw InvalidInput("extract_windows: window shorter than two samples");
  }
  const std::size_t m = quantized_params.channel_count();
  if (m > 0 && quantized_params.size() != n) {
    throw InvalidInput("extract_windows: parameter length differs from data");
  }
  const auto window_len =
      static_cast<std::size_t>(std::llround(samples_per_window));

  auto params_at = [&](std::size_t t) {
    std::vector<double> p(m);
    for (std::size_t c = 0; c < m; ++c) p[c] = quantized_params.channel(c)[t];
    return p;
  };

  std::vector<Window> windows;
  for (std::size_t t = 1; t < n; ++t) {
    bool changed = false;
    for (std::size_t c = 0; c < m && !changed; ++c) {
      const auto ch = quantized_params.channel(c);
      changed = ch[t] != ch[t - 1];
    }
    if (!changed) continue;
    const std::size_t len = std::min(window_len, n - t);
    if (len < 2) continue;
    windows.push_back(Window{t, len, params_at(t)});
  }
  if (windows.empty()) {
    bool any_change = false;
    for (std::size_t c = 0; c < m && !any_change; ++c) {
      const auto ch = quantized_params.channel(c);
      any_change = std::adjacent_find(ch.begin(), ch.end(),
                                      std::not_equal_to<>()) != ch.end();
    }
    if (!any_change) windows.push_back(Window{0, n, params_at(0)});
  }
  return windows;
}

std::vector<std::size_t> threshold_spectra(const Spectrum& u,
                                           const Spectrum& y, double fraction) {
  if (u.size() != y.size() || u.frequencies() != y.frequencies()) {
    throw InvalidInput("threshold_spectra: spectra must share a grid");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidInput("threshold_spectra: fraction must be in (0, 1]");
  }
  auto max_abs = [](const Spectrum& s) {
    double best = 0.0;
    for (const auto& v : s.values()) best = std::max(best, std::abs(v));
    return best;
  };
  const double u_max = max_abs(u);
  const double y_max = max_abs(y);
  if (u_max == 0.0 || y_max == 0.0) {
    logger()->warn("threshold_spectra: all-zero spectrum, no bins kept");
    return {};
  }
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (std::abs(u[k]) >= fraction * u_max &&
        std::abs(y[k]) >= fraction * y_max) {
      kept.push_back(k);
    }
  }
  return kept;
}

}  // namespace iml
