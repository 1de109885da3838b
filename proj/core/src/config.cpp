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
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "iml/csv.hpp"
#include "iml/error.hpp"
#include "iml/harness.hpp"

namespace iml {
namespace {

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) {
    --end;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInput(fmt::format("config: bad value '{}' for {}", text, key));
  }
  return value;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_number<double>(token, key));
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidInput(fmt::format("config: bad boolean '{}' for {}", text, key));
}

std::string format_list(const std::vector<double>& v) {
  return fmt::format("{}", fmt::join(v, " "));
}

std::vector<double> flatten(const std::vector<Interval>& v) {
  std::vector<double> out;
  for (const auto& i : v) {
    out.push_back(i.lower);
    out.push_back(i.upper);
  }
  return out;
}

Interval interval(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 2) {
    throw InvalidInput(fmt::format("config: {} needs 'lower upper'", key));
  }
  return {v[0], v[1]};
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T, typename Access>
Field number(std::string section, std::string key, Access access) {
  const std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) {
            return fmt::format("{}", access(const_cast<RunConfig&>(c)));
          },
          [access, full](RunConfig& c, const std::string& v) {
            access(c) = parse_number<T>(v, full);
          }};
}

template <typename Access>
Field boolean(std::string section, std::string key, Access access) {
  const std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) {
            return std::string(access(const_cast<RunConfig&>(c)) ? "true"
                                                                 : "false");
          },
          [access, full](RunConfig& c, const std::string& v) {
            access(c) = parse_bool(v, full);
          }};
}

template <typename Access>
Field list(std::string section, std::string key, Access access) {
  const std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) {
            return format_list(access(const_cast<RunConfig&>(c)));
          },
          [access, full](RunConfig& c, const std::string& v) {
            access(c) = parse_list(v, full);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back({"run", "trajectory",
                 [](const RunConfig& c) { return c.trajectory; },
                 [](RunConfig& c, const std::string& v) { c.trajectory = v; }});
    f.push_back({"run", "plant", [](const RunConfig& c) { return c.plant; },
                 [](RunConfig& c, const std::string& v) { c.plant = v; }});
    f.push_back({"run", "output",
                 [](const RunConfig& c) { return c.output_dir.string(); },
                 [](RunConfig& c, const std::string& v) { c.output_dir = v; }});
    f.push_back(number<std::uint64_t>(
        "run", "seed", [](RunConfig& c) -> auto& { return c.seed; }));
    f.push_back(number<double>(
        "run", "sample_rate", [](RunConfig& c) -> auto& { return c.sample_rate; }));
    f.push_back(number<int>("run", "iterations", [](RunConfig& c) -> auto& {
      return c.learning.max_iterations;
    }));

    f.push_back(list("trajectory", "slow_start",
                     [](RunConfig& c) -> auto& { return c.slow.start; }));
    f.push_back(list("trajectory", "slow_amplitude",
                     [](RunConfig& c) -> auto& { return c.slow.amplitude; }));
    f.push_back(number<double>("trajectory", "slow_duration",
                               [](RunConfig& c) -> auto& { return c.slow.duration; }));
    f.push_back(list("trajectory", "fast_start",
                     [](RunConfig& c) -> auto& { return c.fast.start; }));
    f.push_back(list("trajectory", "fast_amplitude",
                     [](RunConfig& c) -> auto& { return c.fast.amplitude; }));
    f.push_back(number<double>("trajectory", "fast_duration",
                               [](RunConfig& c) -> auto& { return c.fast.duration; }));
    f.push_back({"trajectory", "lead_in",
                 [](const RunConfig& c) { return fmt::format("{}", c.slow.lead_in); },
                 [](RunConfig& c, const std::string& v) {
                   c.slow.lead_in = c.fast.lead_in =
                       parse_number<double>(v, "trajectory.lead_in");
                 }});
    f.push_back({"trajectory", "tail",
                 [](const RunConfig& c) { return fmt::format("{}", c.slow.tail); },
                 [](RunConfig& c, const std::string& v) {
                   c.slow.tail = c.fast.tail =
                       parse_number<double>(v, "trajectory.tail");
                 }});
    f.push_back(number<double>("seed", "settle_seconds", [](RunConfig& c) -> auto& {
      return c.seed_settle_seconds;
    }));

    auto learning = [&f](const char* key, auto access) {
      f.push_back(number<double>("learning", key, access));
    };
    learning("param_quantum", [](RunConfig& c) -> auto& { return c.learning.param_quantum; });
    learning("window_seconds", [](RunConfig& c) -> auto& { return c.learning.window_seconds; });
    learning("threshold_fraction", [](RunConfig& c) -> auto& { return c.learning.threshold_fraction; });
    learning("gain_fraction", [](RunConfig& c) -> auto& { return c.learning.gain_fraction; });
    learning("sigma_multiple", [](RunConfig& c) -> auto& { return c.learning.sigma_multiple; });
    learning("frequency_cutoff", [](RunConfig& c) -> auto& { return c.learning.frequency_cutoff; });
    learning("stall_tolerance", [](RunConfig& c) -> auto& { return c.learning.stall_tolerance; });
    learning("error_tolerance", [](RunConfig& c) -> auto& { return c.learning.error_tolerance; });
    f.push_back(number<int>("learning", "stall_iterations", [](RunConfig& c) -> auto& {
      return c.learning.stall_iterations;
    }));
    f.push_back(number<std::size_t>("learning", "estimation_grid_points",
                                    [](RunConfig& c) -> auto& {
                                      return c.learning.estimation_grid_points;
                                    }));
    f.push_back(boolean("learning", "use_parameters", [](RunConfig& c) -> auto& {
      return c.learning.use_parameters;
    }));
    f.push_back(boolean("learning", "stop_on_convergence", [](RunConfig& c) -> auto& {
      return c.learning.stop_on_convergence;
    }));
    f.push_back({"learning", "fixed_gain",
                 [](const RunConfig& c) {
                   return c.learning.fixed_gain
                              ? fmt::format("{}", *c.learning.fixed_gain)
                              : std::string();
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v.find_first_not_of(" \t") == std::string::npos) {
                     c.learning.fixed_gain.reset();
                   } else {
                     c.learning.fixed_gain =
                         parse_number<double>(v, "learning.fixed_gain");
                   }
                 }});

    f.push_back({"gp", "sharing",
                 [](const RunConfig& c) {
                   return std::string(c.learning.gp.fit.sharing ==
                                              HyperparameterSharing::per_entry
                                          ? "per_entry"
                                          : "per_output");
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "per_entry") {
                     c.learning.gp.fit.sharing = HyperparameterSharing::per_entry;
                   } else if (v == "per_output") {
                     c.learning.gp.fit.sharing = HyperparameterSharing::per_output;
                   } else {
                     throw InvalidInput(
                         fmt::format("config: bad gp.sharing '{}'", v));
                   }
                 }});
    f.push_back(number<double>("gp", "signal_variance", [](RunConfig& c) -> auto& {
      return c.learning.gp.initial.signal_variance;
    }));
    f.push_back(list("gp", "length_scales", [](RunConfig& c) -> auto& {
      return c.learning.gp.initial.length_scales;
    }));
    f.push_back(number<double>("gp", "noise_variance", [](RunConfig& c) -> auto& {
      return c.learning.gp.initial.noise_variance;
    }));
    f.push_back({"gp", "signal_variance_bounds",
                 [](const RunConfig& c) {
                   return format_list(flatten({c.learning.gp.bounds.signal_variance}));
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.learning.gp.bounds.signal_variance = interval(
                       parse_list(v, "gp.signal_variance_bounds"),
                       "gp.signal_variance_bounds");
                 }});
    f.push_back({"gp", "length_scale_bounds",
                 [](const RunConfig& c) {
                   return format_list(flatten(c.learning.gp.bounds.length_scales));
                 },
                 [](RunConfig& c, const std::string& v) {
                   const auto flat = parse_list(v, "gp.length_scale_bounds");
                   if (flat.empty() || flat.size() % 2 != 0) {
                     throw InvalidInput(
                         "config: gp.length_scale_bounds needs lower/upper pairs");
                   }
                   c.learning.gp.bounds.length_scales.clear();
                   for (std::size_t i = 0; i < flat.size(); i += 2) {
                     c.learning.gp.bounds.length_scales.push_back(
                         {flat[i], flat[i + 1]});
                   }
                 }});
    f.push_back({"gp", "noise_variance_bounds",
                 [](const RunConfig& c) {
                   return format_list(flatten({c.learning.gp.bounds.noise_variance}));
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.learning.gp.bounds.noise_variance =
                       interval(parse_list(v, "gp.noise_variance_bounds"),
                                "gp.noise_variance_bounds");
                 }});
    f.push_back(number<int>("gp", "starts", [](RunConfig& c) -> auto& {
      return c.learning.gp.fit.starts;
    }));
    f.push_back(number<int>("gp", "max_evaluations", [](RunConfig& c) -> auto& {
      return c.learning.gp.fit.max_evaluations_per_start;
    }));
    f.push_back(number<double>("gp", "simplex_tolerance", [](RunConfig& c) -> auto& {
      return c.learning.gp.fit.simplex_tolerance;
    }));
    f.push_back(number<std::size_t>("gp", "fit_max_points", [](RunConfig& c) -> auto& {
      return c.learning.gp.fit.max_points;
    }));
    f.push_back(number<int>("gp", "refit_until_iteration", [](RunConfig& c) -> auto& {
      return c.learning.gp.refit_until_iteration;
    }));
    f.push_back(number<std::size_t>("gp", "max_training_points",
                                    [](RunConfig& c) -> auto& {
                                      return c.learning.gp.max_training_points;
                                    }));

    auto arm = [&f](const char* key, auto access) {
      f.push_back(number<double>("arm", key, access));
    };
    arm("l1", [](RunConfig& c) -> auto& { return c.arm.l1; });
    arm("l2", [](RunConfig& c) -> auto& { return c.arm.l2; });
    arm("tip_mass", [](RunConfig& c) -> auto& { return c.arm.tip_mass; });
    arm("link_mass", [](RunConfig& c) -> auto& { return c.arm.link_mass; });
    arm("spring_stiffness", [](RunConfig& c) -> auto& { return c.arm.spring_stiffness; });
    arm("continuous_torque_limit", [](RunConfig& c) -> auto& { return c.arm.continuous_torque_limit; });
    arm("peak_torque_limit", [](RunConfig& c) -> auto& { return c.arm.peak_torque_limit; });
    arm("motor_speed_limit", [](RunConfig& c) -> auto& { return c.arm.motor_speed_limit; });
    arm("servo_bandwidth", [](RunConfig& c) -> auto& { return c.arm.servo_bandwidth; });
    arm("joint_damping", [](RunConfig& c) -> auto& { return c.arm.joint_damping; });
    f.push_back({"arm", "gravity",
                 [](const RunConfig& c) {
                   return format_list({c.arm.gravity[0], c.arm.gravity[1]});
                 },
                 [](RunConfig& c, const std::string& v) {
                   const auto g = parse_list(v, "arm.gravity");
                   if (g.size() != 2) {
                     throw InvalidInput("config: arm.gravity needs 'gx gy'");
                   }
                   c.arm.gravity = {g[0], g[1]};
                 }});

    f.push_back(number<double>("simulation", "dt", [](RunConfig& c) -> auto& {
      return c.simulation.dt;
    }));
    f.push_back(number<double>("simulation", "measurement_noise",
                               [](RunConfig& c) -> auto& {
                                 return c.simulation.measurement_noise;
                               }));
    f.push_back(number<double>("simulation", "divergence_limit",
                               [](RunConfig& c) -> auto& {
                                 return c.simulation.divergence_limit;
                               }));
    f.push_back(boolean("simulation", "fault_on_saturation",
                        [](RunConfig& c) -> auto& {
                          return c.simulation.fault_on_saturation;
                        }));
    return f;
  }();
  return all;
}

}  // namespace

void RunConfig::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidInput("config: sample_rate must be positive");
  if (trajectory != "slow" && trajectory != "fast" &&
      trajectory.rfind("custom:", 0) != 0) {
    throw InvalidInput(fmt::format("config: unknown trajectory '{}'", trajectory));
  }
  if (trajectory.rfind("custom:", 0) == 0 && trajectory.size() == 7) {
    throw InvalidInput("config: custom trajectory needs a path");
  }
  if (plant != "sea-arm" && plant.rfind("lti:", 0) != 0) {
    throw InvalidInput(fmt::format("config: unknown plant '{}'", plant));
  }
  if (plant.rfind("lti:", 0) == 0 && plant.size() == 4) {
    throw InvalidInput("config: lti plant needs a path");
  }
  for (const auto* spec : {&slow, &fast}) {
    if (!(spec->duration > 0.0) || spec->lead_in < 0.0 || spec->tail < 0.0 ||
        spec->start.size() != spec->amplitude.size() || spec->start.empty()) {
      throw InvalidInput("config: invalid trajectory settings");
    }
  }
  if (seed_settle_seconds < 0.0) {
    throw InvalidInput("config: seed.settle_seconds must be >= 0");
  }
  arm.validate();
  if (!(simulation.dt > 0.0) || !(simulation.divergence_limit > 0.0) ||
      !(simulation.measurement_noise >= 0.0)) {
    throw InvalidInput("config: invalid simulation settings");
  }
  learning.validate();
  if (learning.gp.fit.starts < 1 || learning.gp.fit.max_evaluations_per_start < 1) {
    throw InvalidInput("config: gp.starts and gp.max_evaluations must be >= 1");
  }
}

RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidInput(fmt::format("config: {}", e.message()));
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw InvalidInput(fmt::format("config: key '{}' outside a section",
                                     section));
    }
    for (const auto& [key, value] : body) {
      const auto& all = fields();
      auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) {
        return f.section == section && f.key == key;
      });
      if (it == all.end()) {
        throw InvalidInput(fmt::format("config: unknown key {}.{}", section, key));
      }
      it->set(config, value.get_value<std::string>());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput(fmt::format("config: cannot read {}", path.string()));
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void print_config(const RunConfig& config, std::ostream& out) {
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
}

TimeSeries reference_trajectory(const RunConfig& config) {
  if (config.trajectory == "slow") {
    return generate_trajectory(config.slow, config.sample_rate);
  }
  if (config.trajectory == "fast") {
    return generate_trajectory(config.fast, config.sample_rate);
  }
  if (config.trajectory.rfind("custom:", 0) == 0) {
    TimeSeries ts = read_csv(std::filesystem::path(config.trajectory.substr(7)));
    return ts;
  }
  throw InvalidInput(fmt::format("config: unknown trajectory '{}'",
                                 config.trajectory));
}

}  // namespace iml
