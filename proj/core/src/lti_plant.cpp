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
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "iml/error.hpp"
#include "iml/plant.hpp"

namespace iml {
namespace {

constexpr std::size_t kMaxPaddedLength = std::size_t{1} << 24;

std::vector<double> strip_leading_zeros(std::vector<double> c) {
  auto first = std::find_if(c.begin(), c.end(), [](double v) { return v != 0; });
  c.erase(c.begin(), first);
  return c;
}

bool all_zero(const std::vector<double>& c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

// Controllable canonical realization of a proper rational function.
StateSpace realize(const RationalTf& tf) {
  for (double v : tf.numerator) {
    if (!std::isfinite(v)) throw InvalidInput("LtiPlant: non-finite numerator");
  }
  for (double v : tf.denominator) {
    if (!std::isfinite(v)) {
      throw InvalidInput("LtiPlant: non-finite denominator");
    }
  }
  const auto den = strip_leading_zeros(tf.denominator);
  if (den.empty()) throw InvalidInput("LtiPlant: zero denominator");
  auto num = strip_leading_zeros(tf.numerator);
  if (num.empty()) num = {0.0};
  if (num.size() > den.size()) {
    throw InvalidInput("LtiPlant: improper transfer function");
  }
  const std::size_t n = den.size() - 1;
  std::vector<double> a(den.size());
  std::vector<double> b(den.size(), 0.0);
  for (std::size_t k = 0; k < den.size(); ++k) a[k] = den[k] / den[0];
  for (std::size_t k = 0; k < num.size(); ++k) {
    b[den.size() - num.size() + k] = num[k] / den[0];
  }
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.B = Eigen::MatrixXd::Zero(n, 1);
  ss.C = Eigen::MatrixXd::Zero(1, n);
  ss.D = Eigen::MatrixXd::Constant(1, 1, b[0]);
  if (n > 0) {
    for (std::size_t k = 0; k < n; ++k) {
      ss.A(0, k) = -a[k + 1];
      ss.C(0, k) = b[k + 1] - b[0] * a[k + 1];
    }
    for (std::size_t k = 1; k < n; ++k) ss.A(k, k - 1) = 1.0;
    ss.B(0, 0) = 1.0;
  }
  return ss;
}

Complex polyval(const std::vector<double>& c, Complex s) {
  Complex v = 0.0;
  for (double ck : c) v = v * s + ck;
  return v;
}

std::vector<double> parse_coefficients(const std::string& text,
                                       const std::string& key) {
  std::istringstream in(text);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.empty()) {
    throw InvalidInput(fmt::format("LtiPlant: cannot parse {} '{}'", key, text));
  }
  return out;
}

}  // namespace

LtiPlant::LtiPlant(std::vector<std::vector<RationalTf>> entries,
                   ConvolutionMode mode)
    : mode_(mode) {
  if (entries.empty() || entries.front().empty()) {
    throw InvalidInput("LtiPlant: empty transfer matrix");
  }
  n_inputs_ = entries.front().size();
  for (auto& row : entries) {
    if (row.size() != n_inputs_) {
      throw InvalidInput("LtiPlant: ragged transfer matrix");
    }
    std::vector<Entry> out_row;
    for (auto& tf : row) {
      Entry e;
      e.realization = realize(tf);
      e.zero = all_zero(tf.numerator);
      const Eigen::Index n = e.realization.A.rows();
      if (n > 0) {
        const Eigen::VectorXcd poles = e.realization.A.eigenvalues();
        double slowest = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k) {
          slowest = std::max(slowest, poles(k).real());
        }
        if (!(slowest < 0.0)) {
          throw InvalidInput(fmt::format(
              "LtiPlant: pole with nonnegative real part ({})", slowest));
        }
        e.slowest_pole = -slowest;
      }
      e.tf = std::move(tf);
      out_row.push_back(std::move(e));
    }
    entries_.push_back(std::move(out_row));
  }
}

LtiPlant LtiPlant::scalar(RationalTf g, ConvolutionMode mode) {
  return LtiPlant({{std::move(g)}}, mode);
}

LtiPlant LtiPlant::from_file(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidInput(fmt::format("LtiPlant: {}", e.what()));
  }
  const auto outputs = tree.get<std::size_t>("plant.outputs", 1);
  const auto inputs = tree.get<std::size_t>("plant.inputs", 1);
  const auto mode_name = tree.get<std::string>("plant.mode", "linear");
  ConvolutionMode mode;
  if (mode_name == "linear") {
    mode = ConvolutionMode::linear;
  } else if (mode_name == "circular") {
    mode = ConvolutionMode::circular;
  } else {
    throw InvalidInput(fmt::format("LtiPlant: unknown mode '{}'", mode_name));
  }
  if (outputs == 0 || inputs == 0) {
    throw InvalidInput("LtiPlant: need at least one input and output");
  }
  std::vector<std::vector<RationalTf>> entries(
      outputs, std::vector<RationalTf>(inputs));
  for (const auto& [section, body] : tree) {
    if (section == "plant") continue;
    std::size_t i = 0;
    std::size_t j = 0;
    if (section.size() != 3 || section[0] != 'g' ||
        std::sscanf(section.c_str(), "g%1zu%1zu", &i, &j) != 2 || i < 1 ||
        j < 1 || i > outputs || j > inputs) {
      throw InvalidInput(fmt::format("LtiPlant: bad section [{}]", section));
    }
    auto& tf = entries[i - 1][j - 1];
    tf.numerator = parse_coefficients(body.get<std::string>("num", "0"), "num");
    tf.denominator =
        parse_coefficients(body.get<std::string>("den", "1"), "den");
  }
  return LtiPlant(std::move(entries), mode);
}

Eigen::MatrixXcd LtiPlant::continuous_response(double omega) const {
  Eigen::MatrixXcd g(entries_.size(), n_inputs_);
  const Complex s(0.0, omega);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = 0; j < n_inputs_; ++j) {
      const auto& tf = entry(i, j).tf;
      g(i, j) = polyval(tf.numerator, s) / polyval(tf.denominator, s);
    }
  }
  return g;
}

std::optional<Eigen::MatrixXcd> LtiPlant::frequency_response(
    double omega, std::span<const double> params, double sample_rate) const {
  (void)params;
  if (!(sample_rate > 0.0)) return std::nullopt;
  const double dt = 1.0 / sample_rate;
  Eigen::MatrixXcd g(entries_.size(), n_inputs_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = 0; j < n_inputs_; ++j) {
      const auto& e = entry(i, j);
      g(i, j) = e.zero ? Complex(0.0)
                       : discrete_response(zoh_discretize(e.realization, dt),
                                           omega, dt)(0, 0);
    }
  }
  return g;
}

std::size_t LtiPlant::padded_length(std::size_t n, double sample_rate) const {
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& row : entries_) {
    for (const auto& e : row) {
      if (!e.zero && e.slowest_pole > 0.0) {
        slowest = std::min(slowest, e.slowest_pole);
      }
    }
  }
  // Tail long enough for the impulse response to decay by e^-35.
  double tail = 1.0;
  if (std::isfinite(slowest)) tail = std::ceil(35.0 * sample_rate / slowest);
  const double total = static_cast<double>(n) + tail;
  if (total > static_cast<double>(kMaxPaddedLength)) {
    throw InvalidInput("LtiPlant: impulse response too long to simulate");
  }
  std::size_t m = 2;
  while (static_cast<double>(m) < total) m <<= 1;
  return m;
}

PlantRun LtiPlant::execute(const TimeSeries& u) {
  if (u.channel_count() != n_inputs_ || u.size() < 2) {
    throw InvalidInput(fmt::format(
        "LtiPlant::execute: expected {} channels of >= 2 samples", n_inputs_));
  }
  const double fs = u.sample_rate();
  const double dt = 1.0 / fs;
  const std::size_t n = u.size();
  const std::size_t m =
      mode_ == ConvolutionMode::linear ? padded_length(n, fs) : n;

  std::vector<Spectrum> inputs;
  for (std::size_t j = 0; j < n_inputs_; ++j) {
    std::vector<double> x(m, 0.0);
    const auto ch = u.channel(j);
    std::copy(ch.begin(), ch.end(), x.begin());
    inputs.push_back(forward_transform(x, fs));
  }
  const auto& freqs = inputs.front().frequencies();

  PlantRun run;
  run.output = TimeSeries(fs, u.start_time());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    std::vector<Complex> y(freqs.size(), Complex(0.0));
    for (std::size_t j = 0; j < n_inputs_; ++j) {
      const auto& e = entry(i, j);
      if (e.zero) continue;
      const StateSpace d = zoh_discretize(e.realization, dt);
      for (std::size_t k = 0; k < freqs.size(); ++k) {
        y[k] += discrete_response(d, freqs[k], dt)(0, 0) * inputs[j][k];
      }
    }
    auto out = inverse_transform(Spectrum(freqs, std::move(y)), m, fs);
    out.resize(n);
    run.output.add_channel(fmt::format("y{}", i + 1), std::move(out));
  }
  return run;
}

}  // namespace iml
