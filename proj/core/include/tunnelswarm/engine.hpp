#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tunnelswarm/comms.hpp"
#include "tunnelswarm/controller.hpp"
#include "tunnelswarm/degradation.hpp"
#include "tunnelswarm/injection.hpp"
#include "tunnelswarm/kinematics.hpp"
#include "tunnelswarm/pfddr.hpp"
#include "tunnelswarm/rng.hpp"
#include "tunnelswarm/scenario.hpp"
#include "tunnelswarm/world.hpp"

namespace tunnelswarm {

struct DetectionEvent {
  double t = 0.0;
  int robot = 0;
  PfddrCategory category = PfddrCategory::Sensing;
  double dc = 0.0;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

struct RobotSummary {
  DegradationState final_dc;
  bool failed = false;
  double failed_at = -1.0;
  double battery = 0.0;
  double payload = 0.0;
  double consumed = 0.0;      // units of battery capacity
  double recharged = 0.0;
  /// Forward speed reachable with both wheels at full command, as a fraction
  /// of v_max, given the final coefficients and load.
  double speed_fraction = 1.0;
  /// Mean speed actually achieved over the last kTailSeconds, as a fraction
  /// of v_max.
  double final_speed_fraction = 0.0;
  int maintenance_services = 0;
  double lost_time = 0.0;

  friend bool operator==(const RobotSummary&, const RobotSummary&) = default;
};

inline constexpr double kTailSeconds = 10.0;

struct RunMetrics {
  int blocks_excavated = 0;
  double power_consumed_pct = 0.0;
  int robots_depleted = 0;
  double tunnel_depth = 0.0;
  std::vector<DetectionEvent> detections;
  std::vector<RobotSummary> robots;
  std::uint64_t ticks = 0;
  /// Ticks in which a checked invariant was found broken (only counted when
  /// checking is enabled).
  std::uint64_t invariant_failures = 0;
  std::string first_invariant_failure;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

inline constexpr const char* kTraceHeader =
    "t,robot,x,y,theta,nav_x,nav_y,battery,payload,mode,task,linked,dc_s,dc_l,dc_r,dc_e";

struct EngineOptions {
  bool check_invariants = false;
  /// Per-robot CSV trace rows (header kTraceHeader) every `trace_every` ticks
  /// when set.
  std::ostream* trace = nullptr;
  int trace_every = 10;
  ControllerParams controller;
};

struct RobotState {
  int id = 0;
  Pose pose;
  Vec2 nav{};
  bool lost = false;
  WheelCommand command{};
  WheelCommand achieved{};
  double payload = 0.0;
  double battery = 1.0;
  double consumed = 0.0;
  double recharged = 0.0;
  bool failed = false;
  double failed_at = -1.0;
  double range = 2.5;
  DegradationState dc{};
  PfddrMonitor monitor;
  Controller controller;
  double maintenance_timer = 0.0;
  int maintenance_services = 0;
  double lost_time = 0.0;
  bool excavating = false;
  double tail_path = 0.0;
};

/// Initial pose of robot i: a diagonal line through the zone, facing +x.
Pose initial_pose(int i, int n);

class Simulation {
 public:
  Simulation(const ScenarioSpec& spec, int replicate, EngineOptions options = {});

  void tick();
  bool done() const { return tick_ >= total_ticks_; }
  RunMetrics run();
  RunMetrics metrics() const;

  double time() const { return static_cast<double>(tick_) * c_.dt(); }
  std::uint64_t tick_index() const { return tick_; }
  const World& world() const { return world_; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const ChainStatus& chain() const { return chain_; }
  const InjectionPlan& injection_plan() const { return plan_; }

 private:
  struct Streams {
    RandomStream injection;
    RandomStream power;
    RandomStream dc;
    RandomStream localization;
    RandomStream escape;
    RandomStream ultrasonic;
  };

  void stage_comms(bool sample);
  void check_invariants();
  void write_trace();
  std::vector<CommsNode> comms_nodes() const;

  ScenarioSpec spec_;
  SimConstants c_;
  EngineOptions options_;
  World world_;
  InjectionPlan plan_;
  std::vector<RobotState> robots_;
  std::vector<Streams> streams_;
  std::vector<RandomStream> injection_rngs_;
  std::vector<std::vector<double>> held_range_noise_;
  std::vector<std::vector<UltrasonicContact>> contacts_;
  std::vector<std::optional<int>> handshake_;
  ChainStatus chain_;
  std::vector<DetectionEvent> detections_;
  int depleted_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t total_ticks_ = 0;
  std::uint64_t tail_ticks_ = 0;
  std::uint64_t invariant_failures_ = 0;
  std::string first_invariant_failure_;
  std::string priority_failure_;
  Beacon beacon_;
};

RunMetrics run_replicate(const ScenarioSpec& spec, int replicate, EngineOptions options = {});

}  // namespace tunnelswarm
