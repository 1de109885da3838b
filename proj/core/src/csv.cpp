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
#include "iml/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "iml/error.hpp"

namespace iml {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
      field.pop_back();
    }
    std::size_t first = field.find_first_not_of(' ');
    fields.push_back(first == std::string::npos ? std::string()
                                                : field.substr(first));
  }
  return fields;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInput("read_csv: cannot parse number '" + text + "'");
  }
  return value;
}

}  // namespace

void write_csv(std::ostream& out, const TimeSeries& series) {
  std::string line = "t";
  for (const auto& name : series.names()) line += "," + name;
  out << line << '\n';
  fmt::memory_buffer buf;
  for (std::size_t i = 0; i < series.size(); ++i) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{}", series.time_at(i));
    for (std::size_t c = 0; c < series.channel_count(); ++c) {
      fmt::format_to(std::back_inserter(buf), ",{}", series.channel(c)[i]);
    }
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("write_csv: cannot open " + path.string());
  write_csv(out, series);
}

TimeSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("read_csv: missing header");
  const auto header = split(line);
  if (header.empty() || header.front() != "t") {
    throw InvalidInput("read_csv: first column must be 't'");
  }
  const std::size_t n_channels = header.size() - 1;
  std::vector<double> time;
  std::vector<std::vector<double>> columns(n_channels);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw InvalidInput("read_csv: row has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(header.size()));
    }
    time.push_back(parse_double(fields[0]));
    for (std::size_t c = 0; c < n_channels; ++c) {
      columns[c].push_back(parse_double(fields[c + 1]));
    }
  }
  if (time.size() < 2) {
    throw InvalidInput("read_csv: need at least two rows to infer sample rate");
  }
  const double span = time.back() - time.front();
  if (!(span > 0.0)) throw InvalidInput("read_csv: time column not increasing");
  double rate = static_cast<double>(time.size() - 1) / span;
  // Written time stamps carry rounding; snap rates that are integral to 1e-9.
  if (std::abs(rate - std::round(rate)) < 1e-9 * rate) rate = std::round(rate);
  TimeSeries series(rate, time[0]);
  for (std::size_t c = 0; c < n_channels; ++c) {
    series.add_channel(header[c + 1], std::move(columns[c]));
  }
  return series;
}

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("read_csv: cannot open " + path.string());
  return read_csv(in);
}

}  // namespace iml
