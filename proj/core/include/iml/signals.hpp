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
// Time- and frequency-domain signal containers and the transforms used to
// build training data and apply input corrections.
//
// DFT convention: unnormalized forward transform, 1/N inverse, one-sided
// storage (bins k = 0..floor(N/2)) with Hermitian symmetry implied. Bin k
// sits at omega_k = 2*pi*k*sample_rate/N rad/s.

#ifndef IML_SIGNALS_HPP_
#define IML_SIGNALS_HPP_

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iml {

using Complex = std::complex<double>;

// Uniformly sampled multichannel real-valued signal. All channels share one
// length (>= 1) and one sample rate (> 0).
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(double sample_rate, double start_time = 0.0);

  // Appends a channel. Throws InvalidInput on an empty channel, a length that
  // differs from existing channels, or a duplicate name.
  TimeSeries& add_channel(std::string name, std::vector<double> samples);

  double sample_rate() const noexcept { return sample_rate_; }
  double start_time() const noexcept { return start_time_; }
  double time_at(std::size_t index) const noexcept {
    return start_time_ + static_cast<double>(index) / sample_rate_;
  }

  // Samples per channel; 0 when no channel has been added.
  std::size_t size() const noexcept;
  std::size_t channel_count() const noexcept { return channels_.size(); }

  const std::string& name(std::size_t i) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  std::span<const double> channel(std::size_t i) const;
  std::span<const double> channel(std::string_view name) const;
  std::span<double> mutable_channel(std::size_t i);

  bool operator==(const TimeSeries&) const = default;

 private:
  double sample_rate_ = 1.0;
  double start_time_ = 0.0;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> channels_;
};

// Complex frequency-domain signal on an explicit, strictly increasing,
// nonnegative frequency grid (rad/s).
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(std::vector<double> frequencies, std::vector<Complex> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& frequencies() const noexcept {
    return frequencies_;
  }
  const std::vector<Complex>& values() const noexcept { return values_; }
  Complex operator[](std::size_t k) const { return values_[k]; }

 private:
  std::vector<double> frequencies_;
  std::vector<Complex> values_;
};

// A segment of a signal used for one local frequency-response estimate.
struct Window {
  std::size_t start_index = 0;
  std::size_t length = 0;
  std::vector<double> representative_params;
};

// One-sided DFT grid for n samples at sample_rate, in rad/s.
std::vector<double> dft_frequencies(std::size_t n, double sample_rate);

// Forward DFT of a real channel. Requires at least two samples.
Spectrum forward_transform(std::span<const double> x, double sample_rate);

// Inverse of forward_transform. The spectrum grid must equal
// dft_frequencies(n_samples, sample_rate). Imaginary parts of the DC and
// (even n) Nyquist bins are discarded so the result is real.
std::vector<double> inverse_transform(const Spectrum& s, std::size_t n_samples,
                                      double sample_rate);

// Circular convolution (x * z)[n] = sum_m x[m] z[(n - m) mod N], evaluated by
// direct summation. Both inputs must have equal length.
std::vector<double> circular_convolve(std::span<const double> x,
                                      std::span<const double> z);

// d[0] = 0, d[n] = x[n] - x[n-1].
std::vector<double> first_difference(std::span<const double> x);

// Windows starting at every sample where any quantized parameter channel
// changes value, each window_seconds long and truncated at the signal end
// (segments shorter than 2 samples are dropped). With no changes (or no
// parameter channels) a single window covers the whole signal.
std::vector<Window> extract_windows(const TimeSeries& data,
                                    const TimeSeries& quantized_params,
                                    double window_seconds);

// Indices k with |u_k| >= fraction * max|u| and |y_k| >= fraction * max|y|.
// An all-zero spectrum yields an empty set and a logged warning.
std::vector<std::size_t> threshold_spectra(const Spectrum& u,
                                           const Spectrum& y, double fraction);

}  // namespace iml

#endif  // IML_SIGNALS_HPP_
