#include "tunnelswarm/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "tunnelswarm/errors.hpp"
#include "tunnelswarm/toml_lite.hpp"

namespace tunnelswarm {

std::string_view to_string(FaultCategory c) {
  switch (c) {
    case FaultCategory::Sensing: return "sensing";
    case FaultCategory::MotorLeft: return "motor_left";
    case FaultCategory::MotorRight: return "motor_right";
    case FaultCategory::Excavation: return "excavation";
  }
  return "unknown";
}

std::optional<FaultCategory> parse_fault_category(std::string_view s) {
  if (s == "sensing") return FaultCategory::Sensing;
  if (s == "motor_left") return FaultCategory::MotorLeft;
  if (s == "motor_right") return FaultCategory::MotorRight;
  if (s == "excavation") return FaultCategory::Excavation;
  return std::nullopt;
}

std::string_view to_string(SweepFault f) {
  switch (f) {
    case SweepFault::Sensing: return "sensing";
    case SweepFault::Motor: return "motor";
    case SweepFault::Excavation: return "excavation";
  }
  return "unknown";
}

std::optional<SweepFault> parse_sweep_fault(std::string_view s) {
  if (s == "sensing") return SweepFault::Sensing;
  if (s == "motor") return SweepFault::Motor;
  if (s == "excavation") return SweepFault::Excavation;
  return std::nullopt;
}

namespace {

struct DoubleField {
  const char* name;
  double SimConstants::*member;
};

constexpr std::array kConstantFields{
    DoubleField{"robot_mass", &SimConstants::robot_mass},
    DoubleField{"battery_capacity", &SimConstants::battery_capacity},
    DoubleField{"v_max", &SimConstants::v_max},
    DoubleField{"d_max", &SimConstants::d_max},
    DoubleField{"excavation_rate_max", &SimConstants::excavation_rate_max},
    DoubleField{"tick_rate", &SimConstants::tick_rate},
    DoubleField{"sim_duration", &SimConstants::sim_duration},
    DoubleField{"recharge_rate", &SimConstants::recharge_rate},
    DoubleField{"charge_cutoff", &SimConstants::charge_cutoff},
    DoubleField{"maintenance_duration", &SimConstants::maintenance_duration},
    DoubleField{"corridor_width", &SimConstants::corridor_width},
    DoubleField{"excavation_zone_offset", &SimConstants::excavation_zone_offset},
    DoubleField{"chain_link_range", &SimConstants::chain_link_range},
    DoubleField{"spacing_distance", &SimConstants::spacing_distance},
    DoubleField{"avoid_distance", &SimConstants::avoid_distance},
    DoubleField{"radio_range", &SimConstants::radio_range},
    DoubleField{"block_size", &SimConstants::block_size},
    DoubleField{"wheel_base", &SimConstants::wheel_base},
    DoubleField{"robot_radius", &SimConstants::robot_radius},
    DoubleField{"velocity_midpoint", &SimConstants::velocity_midpoint},
    DoubleField{"excavation_midpoint", &SimConstants::excavation_midpoint},
    DoubleField{"threshold_multiplier", &SimConstants::threshold_multiplier},
    DoubleField{"zone_length", &SimConstants::zone_length},
    DoubleField{"zone_width", &SimConstants::zone_width},
    DoubleField{"proximity_range", &SimConstants::proximity_range},
};

double as_double(const toml::Value& v, const std::string& key) {
  if (v.is_float()) return std::get<double>(v.data);
  if (v.is_integer()) return static_cast<double>(std::get<std::int64_t>(v.data));
  throw ValidationError(key, "expected a number");
}

std::int64_t as_integer(const toml::Value& v, const std::string& key) {
  if (v.is_integer()) return std::get<std::int64_t>(v.data);
  throw ValidationError(key, "expected an integer");
}

bool as_bool(const toml::Value& v, const std::string& key) {
  if (v.is_bool()) return std::get<bool>(v.data);
  throw ValidationError(key, "expected true or false");
}

const std::string& as_string(const toml::Value& v, const std::string& key) {
  if (v.is_string()) return std::get<std::string>(v.data);
  throw ValidationError(key, "expected a string");
}

void reject_nested(const toml::Table& t, const std::string& path) {
  if (!t.tables.empty()) {
    throw ValidationError(path + "." + t.tables.front().first, "unknown table");
  }
  if (!t.arrays.empty()) {
    throw ValidationError(path + "." + t.arrays.front().first, "unknown table array");
  }
}

void load_constants(const toml::Table& t, SimConstants& c) {
  reject_nested(t, "constants");
  for (const auto& [key, value] : t.values) {
    const std::string path = "constants." + key;
    if (key == "soil_rows") {
      const auto rows = as_integer(value, path);
      if (rows < 1 || rows > 100000) throw ValidationError(path, "must lie in [1, 100000]");
      c.soil_rows = static_cast<int>(rows);
      continue;
    }
    auto it = std::find_if(kConstantFields.begin(), kConstantFields.end(),
                           [&](const DoubleField& f) { return key == f.name; });
    if (it == kConstantFields.end()) throw ValidationError(path, "unknown key");
    c.*(it->member) = as_double(value, path);
  }
}

void load_fault(const toml::Table& t, const std::string& path, RobotFaultPlan& plan) {
  reject_nested(t, path);
  std::optional<std::string> category;
  double rate = 0.0;
  std::string rate_key = path + ".rate";
  double increment = 0.01;
  std::string increment_key = path + ".increment";
  bool have_rate = false;
  bool have_increment = false;
  for (const auto& [key, value] : t.values) {
    const std::string k = path + "." + key;
    if (key == "category") {
      category = as_string(value, k);
    } else if (key == "rate" || key == "increment_probability") {
      if (have_rate) throw ValidationError(k, "rate given twice");
      have_rate = true;
      rate = as_double(value, k);
      rate_key = k;
    } else if (key == "increment" || key == "increment_size") {
      if (have_increment) throw ValidationError(k, "increment given twice");
      have_increment = true;
      increment = as_double(value, k);
      increment_key = k;
    } else {
      throw ValidationError(k, "unknown key");
    }
  }
  if (!category) throw ValidationError(path + ".category", "missing");
  if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError(rate_key, "must lie in [0, 1]");
  if (!(increment > 0.0) || !std::isfinite(increment)) {
    throw ValidationError(increment_key, "must be strictly positive");
  }
  if (*category == "motor") {
    plan.channels.push_back({FaultCategory::MotorLeft, rate, increment});
    plan.channels.push_back({FaultCategory::MotorRight, rate, increment});
    return;
  }
  const auto parsed = parse_fault_category(*category);
  if (!parsed) throw ValidationError(path + ".category", "unknown category '" + *category + "'");
  plan.channels.push_back({*parsed, rate, increment});
}

struct PendingRobot {
  std::optional<std::int64_t> id;
  RobotFaultPlan plan;
  std::string path;
};

void load_scenario_values(const std::vector<std::pair<std::string, toml::Value>>& values,
                          const std::string& prefix, ScenarioSpec& spec) {
  for (const auto& [key, value] : values) {
    const std::string k = prefix + key;
    if (key == "scenario_id") {
      spec.scenario_id = as_string(value, k);
    } else if (key == "n_robots") {
      const auto n = as_integer(value, k);
      if (n < 1 || n > 1000) throw ValidationError(k, "must lie in [1, 1000]");
      spec.n_robots = static_cast<int>(n);
    } else if (key == "pfddr_enabled") {
      spec.pfddr_enabled = as_bool(value, k);
    } else if (key == "combination_mode") {
      spec.combination_mode = as_bool(value, k);
    } else if (key == "combination_rate_min") {
      spec.combination_rate_min = as_double(value, k);
    } else if (key == "combination_rate_max") {
      spec.combination_rate_max = as_double(value, k);
    } else if (key == "seed") {
      const auto s = as_integer(value, k);
      if (s < 0) throw ValidationError(k, "must be non-negative");
      spec.seed = static_cast<std::uint64_t>(s);
    } else if (key == "replicates") {
      const auto r = as_integer(value, k);
      if (r < 1 || r > 100000) throw ValidationError(k, "must lie in [1, 100000]");
      spec.replicates = static_cast<int>(r);
    } else {
      throw ValidationError(k, "unknown key");
    }
  }
}

}  // namespace

int ScenarioSpec::n_faulty() const {
  int count = 0;
  const int n = std::min<int>(n_robots, static_cast<int>(fault_plan.size()));
  for (int i = 0; i < n; ++i) {
    const auto& ch = fault_plan[static_cast<std::size_t>(i)].channels;
    const bool active = std::any_of(ch.begin(), ch.end(), [&](const FaultChannel& c) {
      return combination_mode ? combination_rate_max > 0.0 : c.increment_probability > 0.0;
    });
    if (active) ++count;
  }
  return count;
}

std::string ScenarioSpec::fault_types() const {
  bool sensing = false;
  bool motor = false;
  bool excavation = false;
  const int n = std::min<int>(n_robots, static_cast<int>(fault_plan.size()));
  for (int i = 0; i < n; ++i) {
    for (const auto& c : fault_plan[static_cast<std::size_t>(i)].channels) {
      const bool active = combination_mode ? combination_rate_max > 0.0
                                           : c.increment_probability > 0.0;
      if (!active) continue;
      switch (c.category) {
        case FaultCategory::Sensing: sensing = true; break;
        case FaultCategory::MotorLeft:
        case FaultCategory::MotorRight: motor = true; break;
        case FaultCategory::Excavation: excavation = true; break;
      }
    }
  }
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(sensing, "sensing");
  add(motor, "motor");
  add(excavation, "excavation");
  return out.empty() ? "none" : out;
}

void ScenarioSpec::validate() const {
  constants.validate();
  if (scenario_id.empty()) throw ValidationError("scenario.scenario_id", "must not be empty");
  for (char c : scenario_id) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r' || c == '/' || c == '\\') {
      throw ValidationError("scenario.scenario_id",
                            "must not contain separators, quotes or path characters");
    }
  }
  if (n_robots < 1) throw ValidationError("scenario.n_robots", "must be at least 1");
  if (replicates < 1) throw ValidationError("scenario.replicates", "must be at least 1");
  if (static_cast<int>(fault_plan.size()) > n_robots) {
    throw ValidationError("scenario.robot", "more robot entries than n_robots");
  }
  if (!(combination_rate_min >= 0.0 && combination_rate_min <= combination_rate_max &&
        combination_rate_max <= 1.0)) {
    throw ValidationError("scenario.combination_rate_min",
                          "need 0 <= combination_rate_min <= combination_rate_max <= 1");
  }
  for (std::size_t i = 0; i < fault_plan.size(); ++i) {
    for (std::size_t j = 0; j < fault_plan[i].channels.size(); ++j) {
      const auto& c = fault_plan[i].channels[j];
      const std::string path =
          "scenario.robot[" + std::to_string(i) + "].fault[" + std::to_string(j) + "]";
      if (!(c.increment_probability >= 0.0 && c.increment_probability <= 1.0)) {
        throw ValidationError(path + ".rate", "must lie in [0, 1]");
      }
      if (!(c.increment_size > 0.0)) {
        throw ValidationError(path + ".increment", "must be strictly positive");
      }
    }
  }
}

ScenarioSpec load_scenario(std::string_view text) {
  const toml::Table doc = toml::parse(text);
  ScenarioSpec spec;

  // Bare top-level keys are read as [scenario] keys.
  load_scenario_values(doc.values, "", spec);
  for (const auto& [name, arr] : doc.arrays) {
    throw ValidationError(name, "unknown table array");
  }

  std::vector<PendingRobot> robots;
  for (const auto& [name, table] : doc.tables) {
    if (name == "constants") {
      load_constants(table, spec.constants);
    } else if (name == "scenario") {
      load_scenario_values(table.values, "scenario.", spec);
      for (const auto& [sub, _] : table.tables) {
        throw ValidationError("scenario." + sub, "unknown table");
      }
      for (const auto& [sub, arr] : table.arrays) {
        if (sub != "robot") throw ValidationError("scenario." + sub, "unknown table array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          const auto& rt = arr[i];
          PendingRobot pr;
          pr.path = "scenario.robot[" + std::to_string(i) + "]";
          for (const auto& [key, value] : rt.values) {
            if (key != "id") throw ValidationError(pr.path + "." + key, "unknown key");
            pr.id = as_integer(value, pr.path + ".id");
          }
          for (const auto& [t, _] : rt.tables) {
            throw ValidationError(pr.path + "." + t, "unknown table");
          }
          for (const auto& [fa, faults] : rt.arrays) {
            if (fa != "fault") throw ValidationError(pr.path + "." + fa, "unknown table array");
            for (std::size_t j = 0; j < faults.size(); ++j) {
              load_fault(faults[j], pr.path + ".fault[" + std::to_string(j) + "]", pr.plan);
            }
          }
          robots.push_back(std::move(pr));
        }
      }
    } else {
      throw ValidationError(name, "unknown table");
    }
  }

  spec.fault_plan.assign(static_cast<std::size_t>(spec.n_robots), RobotFaultPlan{});
  std::vector<bool> taken(static_cast<std::size_t>(spec.n_robots), false);
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const auto id = robots[i].id.value_or(static_cast<std::int64_t>(i));
    if (id < 0 || id >= spec.n_robots) {
      throw ValidationError(robots[i].path + ".id", "must lie in [0, n_robots)");
    }
    if (taken[static_cast<std::size_t>(id)]) {
      throw ValidationError(robots[i].path + ".id", "robot listed twice");
    }
    taken[static_cast<std::size_t>(id)] = true;
    spec.fault_plan[static_cast<std::size_t>(id)] = std::move(robots[i].plan);
  }

  if (spec.scenario_id.empty()) throw ValidationError("scenario.scenario_id", "missing");
  spec.validate();
  return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::ostringstream out;
  out << "[constants]\n";
  for (const auto& f : kConstantFields) {
    out << f.name << " = " << toml::format_float(spec.constants.*(f.member)) << "\n";
  }
  out << "soil_rows = " << spec.constants.soil_rows << "\n";

  out << "\n[scenario]\n";
  out << "scenario_id = " << toml::quote(spec.scenario_id) << "\n";
  out << "n_robots = " << spec.n_robots << "\n";
  out << "pfddr_enabled = " << (spec.pfddr_enabled ? "true" : "false") << "\n";
  out << "combination_mode = " << (spec.combination_mode ? "true" : "false") << "\n";
  out << "combination_rate_min = " << toml::format_float(spec.combination_rate_min) << "\n";
  out << "combination_rate_max = " << toml::format_float(spec.combination_rate_max) << "\n";
  out << "seed = " << spec.seed << "\n";
  out << "replicates = " << spec.replicates << "\n";

  for (std::size_t i = 0; i < spec.fault_plan.size(); ++i) {
    const auto& plan = spec.fault_plan[i];
    if (plan.channels.empty()) continue;
    out << "\n[[scenario.robot]]\n";
    out << "id = " << i << "\n";
    for (const auto& c : plan.channels) {
      out << "\n[[scenario.robot.fault]]\n";
      out << "category = " << toml::quote(to_string(c.category)) << "\n";
      out << "rate = " << toml::format_float(c.increment_probability) << "\n";
      out << "increment = " << toml::format_float(c.increment_size) << "\n";
    }
  }
  return out.str();
}

namespace {

constexpr double kSweepRate = 0.15;
constexpr double kIncrement = 0.01;

RobotFaultPlan plan_for(SweepFault f, double rate) {
  RobotFaultPlan plan;
  switch (f) {
    case SweepFault::Sensing:
      plan.channels.push_back({FaultCategory::Sensing, rate, kIncrement});
      break;
    case SweepFault::Motor:
      plan.channels.push_back({FaultCategory::MotorLeft, rate, kIncrement});
      plan.channels.push_back({FaultCategory::MotorRight, rate, kIncrement});
      break;
    case SweepFault::Excavation:
      plan.channels.push_back({FaultCategory::Excavation, rate, kIncrement});
      break;
  }
  return plan;
}

}  // namespace

std::vector<ScenarioSpec> preset(const PresetRequest& request, std::uint64_t seed) {
  std::vector<ScenarioSpec> out;
  const auto on_off = [](bool b) { return b ? "on" : "off"; };
  switch (request.kind) {
    case PresetKind::Ideal: {
      ScenarioSpec s;
      s.scenario_id = "ideal";
      s.pfddr_enabled = request.pfddr;
      s.seed = seed;
      s.fault_plan.assign(static_cast<std::size_t>(s.n_robots), RobotFaultPlan{});
      out.push_back(std::move(s));
      break;
    }
    case PresetKind::IsolatedSweep: {
      for (int k = 0; k <= 5; ++k) {
        ScenarioSpec s;
        s.scenario_id = std::string("sweep-") + std::string(to_string(request.fault)) +
                        "-pfddr-" + on_off(request.pfddr) + "-n" + std::to_string(k);
        s.pfddr_enabled = request.pfddr;
        s.seed = seed;
        s.fault_plan.assign(static_cast<std::size_t>(s.n_robots), RobotFaultPlan{});
        for (int r = 0; r < k; ++r) {
          s.fault_plan[static_cast<std::size_t>(r)] = plan_for(request.fault, kSweepRate);
        }
        out.push_back(std::move(s));
      }
      break;
    }
    case PresetKind::Combination: {
      ScenarioSpec s;
      s.scenario_id = std::string("combo-pfddr-") + on_off(request.pfddr);
      s.pfddr_enabled = request.pfddr;
      s.combination_mode = true;
      s.seed = seed;
      s.fault_plan.assign(static_cast<std::size_t>(s.n_robots), RobotFaultPlan{});
      for (auto& plan : s.fault_plan) {
        plan.channels = {
            {FaultCategory::Sensing, s.combination_rate_max, kIncrement},
            {FaultCategory::MotorLeft, s.combination_rate_max, kIncrement},
            {FaultCategory::MotorRight, s.combination_rate_max, kIncrement},
            {FaultCategory::Excavation, s.combination_rate_max, kIncrement},
        };
      }
      out.push_back(std::move(s));
      break;
    }
  }
  return out;
}

std::optional<std::vector<ScenarioSpec>> named_preset(std::string_view name,
                                                      std::uint64_t seed) {
  if (name == "ideal") return preset({PresetKind::Ideal, SweepFault::Sensing, false}, seed);
  if (name == "ideal-pfddr-on") {
    auto specs = preset({PresetKind::Ideal, SweepFault::Sensing, true}, seed);
    specs.front().scenario_id = "ideal-pfddr-on";
    return specs;
  }
  if (name == "combo-pfddr-on") {
    return preset({PresetKind::Combination, SweepFault::Sensing, true}, seed);
  }
  if (name == "combo-pfddr-off") {
    return preset({PresetKind::Combination, SweepFault::Sensing, false}, seed);
  }
  constexpr std::string_view prefix = "sweep-";
  if (name.substr(0, prefix.size()) == prefix) {
    const auto rest = name.substr(prefix.size());
    const auto dash = rest.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    const auto fault = parse_sweep_fault(rest.substr(0, dash));
    const auto tail = rest.substr(dash + 1);
    if (!fault) return std::nullopt;
    if (tail == "pfddr-on") return preset({PresetKind::IsolatedSweep, *fault, true}, seed);
    if (tail == "pfddr-off") return preset({PresetKind::IsolatedSweep, *fault, false}, seed);
  }
  return std::nullopt;
}

}  // namespace tunnelswarm
