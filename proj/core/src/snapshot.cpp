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
#include "iml/snapshot.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "iml/error.hpp"

namespace iml {
namespace {

using nlohmann::json;

json complex_json(Complex v) { return json::array({v.real(), v.imag()}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw InvalidInput("snapshot: complex value must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void save_snapshot(const MimoGp& model, std::ostream& out) {
  json doc;
  doc["format"] = kSnapshotFormat;
  doc["n_outputs"] = model.n_outputs();
  doc["n_inputs"] = model.n_inputs();
  doc["location_dim"] = model.location_dim();
  json rows = json::array();
  for (std::size_t i = 0; i < model.n_outputs(); ++i) {
    const GpRow& row = model.row(i);
    json hyper = json::array();
    for (const auto& p : row.hyperparameters()) {
      hyper.push_back({{"signal_variance", p.signal_variance},
                       {"length_scales", p.length_scales},
                       {"noise_variance", p.noise_variance}});
    }
    json points = json::array();
    for (const auto& pt : row.points()) {
      json w = json::array();
      for (Complex v : pt.weights) w.push_back(complex_json(v));
      points.push_back(
          {{"x", pt.location}, {"w", w}, {"y", complex_json(pt.target)}});
    }
    rows.push_back({{"hyperparameters", hyper}, {"points", points}});
  }
  doc["rows"] = rows;
  out << doc.dump() << '\n';
}

void save_snapshot(const MimoGp& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput(fmt::format("cannot write {}", path.string()));
  save_snapshot(model, out);
}

MimoGp load_snapshot(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
    if (doc.at("format").get<std::string>() != kSnapshotFormat) {
      throw InvalidInput(fmt::format("snapshot: unsupported format '{}'",
                                     doc.at("format").get<std::string>()));
    }
    MimoGp model(doc.at("n_outputs").get<std::size_t>(),
                 doc.at("n_inputs").get<std::size_t>(),
                 doc.at("location_dim").get<std::size_t>());
    const json& rows = doc.at("rows");
    if (!rows.is_array() || rows.size() != model.n_outputs()) {
      throw InvalidInput("snapshot: row count mismatch");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<KernelParams> hyper;
      for (const auto& h : rows[i].at("hyperparameters")) {
        KernelParams p;
        p.signal_variance = h.at("signal_variance").get<double>();
        p.length_scales = h.at("length_scales").get<std::vector<double>>();
        p.noise_variance = h.at("noise_variance").get<double>();
        hyper.push_back(std::move(p));
      }
      std::vector<TrainingPoint> points;
      for (const auto& pj : rows[i].at("points")) {
        TrainingPoint pt;
        pt.location = pj.at("x").get<std::vector<double>>();
        for (const auto& w : pj.at("w")) pt.weights.push_back(complex_from(w));
        pt.target = complex_from(pj.at("y"));
        points.push_back(std::move(pt));
      }
      GpRow& row = model.row(i);
      row.set_hyperparameters(std::move(hyper));
      row.set_points(std::move(points));
      if (!row.points().empty()) row.train();
    }
    return model;
  } catch (const json::exception& e) {
    throw InvalidInput(fmt::format("snapshot: {}", e.what()));
  }
}

MimoGp load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot read {}", path.string()));
  return load_snapshot(in);
}

}  // namespace iml
