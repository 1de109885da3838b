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
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "iml/error.hpp"
#include "iml/harness.hpp"

namespace iml {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<std::size_t> columns(const std::string& prefix) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c].rfind(prefix, 0) == 0) out.push_back(c);
    }
    return out;
  }
  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw InvalidInput(fmt::format("report: missing column {}", name));
    }
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("report: cannot read {}", path.string()));
  Table t;
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInput(fmt::format("report: {} is empty", path.string()));
  }
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(std::stod(cell));
    if (row.size() != t.header.size()) {
      throw InvalidInput(fmt::format("report: ragged row in {}", path.string()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string bracket(const std::vector<double>& row,
                    const std::vector<std::size_t>& cols) {
  std::vector<std::string> parts;
  for (std::size_t c : cols) parts.push_back(fmt::format("{:.3f}", row[c]));
  std::string s = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) s += ", ";
    s += parts[i];
  }
  return s + "] rad";
}

double row_max(const std::vector<double>& row,
               const std::vector<std::size_t>& cols) {
  double m = 0.0;
  for (std::size_t c : cols) m = std::max(m, row[c]);
  return m;
}

}  // namespace

std::string report(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) {
    throw InvalidInput(fmt::format("report: {} is not a directory",
                                   run_dir.string()));
  }
  if (!fs::exists(run_dir / "convergence.csv")) {
    throw InvalidInput(fmt::format("report: {} holds no run (convergence.csv "
                                   "missing)",
                                   run_dir.string()));
  }
  const Table conv = read_table(run_dir / "convergence.csv");
  const auto max_cols = conv.columns("max_e");
  const auto rms_cols = conv.columns("rms_e");
  const std::size_t feasible_col = conv.column("feasible_fraction");
  const std::size_t rho_col = conv.column("mean_rho");
  const std::size_t points_col = conv.column("training_points");

  json status;
  bool have_status = false;
  if (std::ifstream in(run_dir / "status.json"); in) {
    status = json::parse(in, nullptr, false);
    have_status = !status.is_discarded();
  }

  std::ostringstream text;
  if (conv.rows.empty()) {
    text << fmt::format("run: {}\n", run_dir.string());
    if (have_status && status.value("faulted", false)) {
      text << fmt::format("status: plant fault before the first iteration: {}\n",
                          status.value("message", std::string()));
    } else {
      text << "status: incomplete\n";
    }
    text << "iterations: none\n";
    std::ofstream(run_dir / "summary.txt") << text.str();
    return text.str();
  }
  const auto& first = conv.rows.front();
  const auto& last = conv.rows.back();
  const auto last_index = static_cast<int>(last[0]);
  text << fmt::format("run: {}\n", run_dir.string());
  if (!have_status) {
    text << "status: incomplete (no status.json)\n";
  } else if (status.value("faulted", false)) {
    text << fmt::format("status: plant fault at iteration {}: {}\n",
                        last_index, status.value("message", std::string()));
  } else {
    text << "status: completed\n";
  }
  text << fmt::format("iterations: 0..{}\n", last_index);
  text << fmt::format("initial max error {}\n", bracket(first, max_cols));
  text << fmt::format("final max error {} (iteration {})\n",
                      bracket(last, max_cols), last_index);
  const double e0 = row_max(first, max_cols);
  const double ef = row_max(last, max_cols);
  if (e0 > 0.0) {
    text << fmt::format("reduction in max error: {:.1f}%\n",
                        100.0 * (1.0 - ef / e0));
  }
  if (have_status) {
    const int at = status.value("converged_at", -1);
    text << (status.value("converged", false)
                 ? fmt::format("converged at iteration {}\n", at)
                 : std::string("not converged\n"));
  }
  text << "\niteration";
  for (std::size_t c : max_cols) text << fmt::format(" {:>10}", conv.header[c]);
  for (std::size_t c : rms_cols) text << fmt::format(" {:>10}", conv.header[c]);
  text << fmt::format(" {:>9} {:>9} {:>8}\n", "feasible", "mean_rho", "points");
  for (const auto& row : conv.rows) {
    text << fmt::format("{:>9}", static_cast<int>(row[0]));
    for (std::size_t c : max_cols) text << fmt::format(" {:>10.5f}", row[c]);
    for (std::size_t c : rms_cols) text << fmt::format(" {:>10.5f}", row[c]);
    text << fmt::format(" {:>9.3f} {:>9.4f} {:>8}\n", row[feasible_col],
                        row[rho_col], static_cast<long>(row[points_col]));
  }

  const fs::path last_json =
      run_dir / "iterations" / fmt::format("iter_{:02d}.json", last_index);
  if (std::ifstream in(last_json); in) {
    const json j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("hyperparameters")) {
      text << "\nhyperparameters after the last iteration:\n";
      const auto& rows = j["hyperparameters"];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
          const auto& p = rows[i][k];
          std::vector<double> ls = p["length_scales"].get<std::vector<double>>();
          std::string scales;
          for (std::size_t d = 0; d < ls.size(); ++d) {
            scales += fmt::format("{}{:.4g}", d > 0 ? ", " : "", ls[d]);
          }
          text << fmt::format(
              "  G{}{}: signal_variance {:.4g}, length_scales [{}], noise "
              "{:.3g}\n",
              i + 1, k + 1, p["signal_variance"].get<double>(), scales,
              p["noise_variance"].get<double>());
        }
      }
    }
  }
  std::vector<std::string> tables;
  for (const char* name : {"bode_pose_1.csv", "bode_pose_2.csv"}) {
    if (fs::exists(run_dir / name)) tables.emplace_back(name);
  }
  if (!tables.empty()) {
    text << "\npose model tables:";
    for (const auto& t : tables) text << ' ' << t;
    text << '\n';
  }

  {
    std::ofstream out(run_dir / "summary.txt");
    out << text.str();
  }
  {
    std::ofstream out(run_dir / "summary.csv");
    out << "iteration";
    for (std::size_t c : max_cols) out << ',' << conv.header[c];
    for (std::size_t c : rms_cols) out << ',' << conv.header[c];
    out << ",max_error,relative_to_initial,feasible_fraction,mean_rho\n";
    for (const auto& row : conv.rows) {
      out << static_cast<int>(row[0]);
      for (std::size_t c : max_cols) out << fmt::format(",{}", row[c]);
      for (std::size_t c : rms_cols) out << fmt::format(",{}", row[c]);
      const double m = row_max(row, max_cols);
      out << fmt::format(",{},{},{},{}\n", m, e0 > 0.0 ? m / e0 : 0.0,
                         row[feasible_col], row[rho_col]);
    }
  }
  return text.str();
}

}  // namespace iml
