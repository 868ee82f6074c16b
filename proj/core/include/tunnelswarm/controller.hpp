#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "tunnelswarm/comms.hpp"
#include "tunnelswarm/constants.hpp"
#include "tunnelswarm/geometry.hpp"
#include "tunnelswarm/kinematics.hpp"
#include "tunnelswarm/rng.hpp"
#include "tunnelswarm/world.hpp"

namespace tunnelswarm {

enum class ModeKind {
  InZoneIdle,
  Charging,
  UnderMaintenance,
  TransitToFace,
  Excavating,
  ReturnToBase,
  Avoiding,
  HoldChain,
  HoldSpacing,
  Lost,
  Failed,
};

enum class ReturnReason { Deposit, LowPower, MaintenanceNeeded };

std::string_view to_string(ModeKind k);
std::string_view to_string(ReturnReason r);

/// Reported behaviour. `reason` qualifies ReturnToBase; `resume` and
/// `resume_reason` name the underlying task for Avoiding, holds and Lost.
struct BehaviorMode {
  ModeKind kind = ModeKind::TransitToFace;
  ReturnReason reason = ReturnReason::Deposit;
  ModeKind resume = ModeKind::TransitToFace;
  ReturnReason resume_reason = ReturnReason::Deposit;

  /// The task beneath any override.
  ModeKind task() const;
  ReturnReason task_reason() const;
  /// Heading into the tunnel: transit, excavation and the holds on the way.
  bool outbound() const;

  friend bool operator==(const BehaviorMode&, const BehaviorMode&) = default;
};

/// What a robot hears about a peer over radio.
struct PeerView {
  Vec2 believed;
  double battery = 1.0;
  double payload = 0.0;
  BehaviorMode mode;
  bool linked = false;
  bool alive = true;
};

struct ControlContext {
  int self = 0;
  double t = 0.0;
  Vec2 nav;              // navigation estimate
  double heading = 0.0;
  bool lost = false;
  bool in_zone = false;  // on the demarcated maintenance floor
  double battery = 1.0;
  double payload = 0.0;
  bool linked = false;
  std::array<bool, 3> flags{};  // sensing, locomotion, excavation
  const ProximityScan* scan = nullptr;
  const std::vector<UltrasonicContact>* contacts = nullptr;
  const std::vector<PeerView>* peers = nullptr;  // indexed by robot id
  const World* world = nullptr;
  Vec2 tool_position;    // where the excavation tool physically is
  Vec2 odometry;         // dead-reckoned position, free of beacon corrections
  const SimConstants* constants = nullptr;
};

struct Decision {
  WheelCommand command;
  bool excavate = false;
  std::optional<BlockId> block;
  bool deposit = false;
};

/// Tunable behaviour parameters; none of them change the physical model.
struct ControllerParams {
  double outbound_lane_y = -0.2;
  double inbound_lane_y = 0.2;
  Vec2 zone_waypoint{-0.3, -0.2};
  double funnel_tolerance = 0.12;
  double deposit_margin = 0.05;
  double tool_reach = 0.08;
  double lookahead = 0.35;
  double face_approach = 0.7;
  double wall_margin = 0.05;
  double rotate_threshold = 0.7;
  double turn_gain = 3.0;
  double max_turn_rate = 2.0;
  double chain_margin = 0.15;
  /// Rate (m/s) at which the smoothed ultrasonic range envelopes relax
  /// toward the latest reading.
  double range_envelope_rate = 0.25;
  double stall_window = 5.0;
  double stall_distance = 0.05;
  double escape_reverse = 0.2;
  double escape_timeout = 2.0;
  double avoid_commit = 1.0;
  double entrance_clearance = 1.0;
  double departure_commit = 0.6;
  double slot_x = -1.7;
  std::array<double, 5> slot_y{-0.88, -0.44, 0.0, 0.44, 0.88};
  double slot_tolerance = 0.08;
};

/// Nearest column centre to `believed_y`; ties go to the lowest (row, col).
BlockId select_block(const std::vector<BlockId>& frontier, double believed_y, const World& world);

/// Reaction to a nearby robot: rotate away when it is within +-30 degrees,
/// otherwise cap `base` at half speed and add a fixed turn rate away from it.
WheelCommand avoidance_command(const ProximityScan& scan, WheelCommand base, double v_max,
                               double wheel_base, double avoid_distance);

/// Bounds on the recent measured range to one ultrasonic contact.
struct RangeEnvelope {
  double hi = 0.0;
  double lo = 0.0;
  bool valid = false;
};

/// Per-robot behaviour state machine.
class Controller {
 public:
  explicit Controller(const SimConstants& c, ControllerParams p = {});

  Decision step(const ControlContext& ctx, RandomStream& yaw_rng);

  const BehaviorMode& mode() const { return mode_; }
  std::optional<BlockId> assigned_block() const { return block_; }

  /// Service hooks used by the engine.
  void set_failed();
  void force_charging();

 private:
  enum class EscapePhase { None, Reverse, Yaw };

  WheelCommand drive_to(Vec2 target, const ControlContext& ctx, double speed) const;
  WheelCommand lane_command(double lane_y, double direction, const ControlContext& ctx) const;
  WheelCommand outbound_command(const ControlContext& ctx);
  WheelCommand return_command(const ControlContext& ctx) const;
  Vec2 slot_position(int self) const;
  std::optional<BlockId> approach_target(const ControlContext& ctx) const;
  std::optional<BlockId> reachable_block(const ControlContext& ctx) const;
  void update_envelopes(const ControlContext& ctx);
  bool chain_hold(const ControlContext& ctx) const;
  /// No linked neighbor behind within the full link range.
  bool chain_broken(const ControlContext& ctx) const;
  bool spacing_hold(const ControlContext& ctx) const;
  /// True when this robot is the outbound robot in the zone nearest the
  /// corridor waypoint, or is already in the corridor.
  bool departure_turn(const ControlContext& ctx) const;
  bool robot_close(const ControlContext& ctx) const;
  void begin_return(ReturnReason r);
  void after_deposit(const ControlContext& ctx);
  bool update_stall(const ControlContext& ctx, bool moving);

  SimConstants c_;
  ControllerParams p_;
  BehaviorMode mode_;
  // Task state: kind is one of TransitToFace, Excavating, ReturnToBase,
  // InZoneIdle, Charging, UnderMaintenance, Failed.
  ModeKind task_ = ModeKind::TransitToFace;
  ReturnReason reason_ = ReturnReason::Deposit;
  bool charge_full_ = false;
  std::optional<BlockId> block_;

  // Indexed by peer id; the reference uses the last slot.
  std::vector<RangeEnvelope> envelopes_;
  double envelope_t_ = 0.0;

  Vec2 stall_anchor_;
  double stall_since_ = 0.0;
  bool stall_tracking_ = false;
  EscapePhase escape_ = EscapePhase::None;
  Vec2 escape_start_;
  double escape_started_ = 0.0;
  double avoid_until_ = -1.0;
  double yaw_target_ = 0.0;
};

}  // namespace tunnelswarm
