#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunnelswarm/constants.hpp"

namespace tunnelswarm {

enum class FaultCategory { Sensing, MotorLeft, MotorRight, Excavation };

std::string_view to_string(FaultCategory c);
std::optional<FaultCategory> parse_fault_category(std::string_view s);

struct FaultChannel {
  FaultCategory category = FaultCategory::Sensing;
  double increment_probability = 0.0;  // per-second Bernoulli rate
  double increment_size = 0.01;        // dc units

  friend bool operator==(const FaultChannel&, const FaultChannel&) = default;
};

/// Fault channels for one robot.
struct RobotFaultPlan {
  std::vector<FaultChannel> channels;
  friend bool operator==(const RobotFaultPlan&, const RobotFaultPlan&) = default;
};

struct ScenarioSpec {
  std::string scenario_id;
  int n_robots = 5;
  bool pfddr_enabled = false;
  /// Index i holds the plan of robot i; robots beyond the end are fault-free.
  std::vector<RobotFaultPlan> fault_plan;
  /// When set, every channel's rate is redrawn per robot at run start from
  /// [combination_rate_min, combination_rate_max].
  bool combination_mode = false;
  double combination_rate_min = 0.01;
  double combination_rate_max = 0.15;
  std::uint64_t seed = 1;
  int replicates = 10;
  SimConstants constants;

  /// Robots that carry at least one channel able to fire.
  int n_faulty() const;
  /// "none", or the distinct fault types joined by '+', e.g. "motor" or
  /// "sensing+motor+excavation".
  std::string fault_types() const;

  /// Throws ValidationError naming the offending key.
  void validate() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Parses a scenario document. Throws ParseError for malformed text and
/// ValidationError for unknown keys, wrong types and out-of-range values.
ScenarioSpec load_scenario(std::string_view text);

/// Canonical TOML form; load_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

enum class PresetKind { Ideal, IsolatedSweep, Combination };

/// Fault types addressable by the isolated sweep. Motor afflicts both wheels.
enum class SweepFault { Sensing, Motor, Excavation };

std::string_view to_string(SweepFault f);
std::optional<SweepFault> parse_sweep_fault(std::string_view s);

struct PresetRequest {
  PresetKind kind = PresetKind::Ideal;
  SweepFault fault = SweepFault::Sensing;
  bool pfddr = false;
};

/// Ideal -> 1 spec; IsolatedSweep -> 6 specs with 0..5 afflicted robots at
/// rate 0.15; Combination -> 1 spec with all channels on every robot.
std::vector<ScenarioSpec> preset(const PresetRequest& request, std::uint64_t seed = 1);

/// Named presets accepted by the CLI: "ideal", "combo-pfddr-on",
/// "combo-pfddr-off", and "sweep-<sensing|motor|excavation>-pfddr-<on|off>".
std::optional<std::vector<ScenarioSpec>> named_preset(std::string_view name,
                                                      std::uint64_t seed = 1);

}  // namespace tunnelswarm
