#include "tunnelswarm/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tunnelswarm {

std::string_view to_string(ModeKind k) {
  switch (k) {
    case ModeKind::InZoneIdle: return "in_zone_idle";
    case ModeKind::Charging: return "charging";
    case ModeKind::UnderMaintenance: return "under_maintenance";
    case ModeKind::TransitToFace: return "transit_to_face";
    case ModeKind::Excavating: return "excavating";
    case ModeKind::ReturnToBase: return "return_to_base";
    case ModeKind::Avoiding: return "avoiding";
    case ModeKind::HoldChain: return "hold_chain";
    case ModeKind::HoldSpacing: return "hold_spacing";
    case ModeKind::Lost: return "lost";
    case ModeKind::Failed: return "failed";
  }
  return "unknown";
}

std::string_view to_string(ReturnReason r) {
  switch (r) {
    case ReturnReason::Deposit: return "deposit";
    case ReturnReason::LowPower: return "low_power";
    case ReturnReason::MaintenanceNeeded: return "maintenance_needed";
  }
  return "unknown";
}

ModeKind BehaviorMode::task() const {
  switch (kind) {
    case ModeKind::Avoiding:
    case ModeKind::HoldChain:
    case ModeKind::HoldSpacing:
    case ModeKind::Lost: return resume;
    default: return kind;
  }
}

ReturnReason BehaviorMode::task_reason() const {
  return task() == kind ? reason : resume_reason;
}

bool BehaviorMode::outbound() const {
  if (kind == ModeKind::Lost) return false;
  const ModeKind t = task();
  return t == ModeKind::TransitToFace || t == ModeKind::Excavating;
}

BlockId select_block(const std::vector<BlockId>& frontier, double believed_y, const World& world) {
  BlockId best = frontier.front();
  double best_d = std::abs(world.column_center_y(best.col) - believed_y);
  for (const auto& b : frontier) {
    const double d = std::abs(world.column_center_y(b.col) - believed_y);
    if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && b < best)) {
      best = b;
      best_d = d;
    }
  }
  return best;
}

WheelCommand avoidance_command(const ProximityScan& scan, WheelCommand base, double v_max,
                               double wheel_base, double avoid_distance) {
  int nearest = -1;
  for (int k = 0; k < kProximityRays; ++k) {
    const auto& r = scan[static_cast<std::size_t>(k)];
    if (r.kind != HitKind::Robot || r.range >= avoid_distance) continue;
    if (nearest < 0 || r.range < scan[static_cast<std::size_t>(nearest)].range) nearest = k;
  }
  if (nearest < 0) return base;
  const double half = 0.5 * v_max;

  double left = std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kProximityRays; ++k) {
    const double a = kProximityAngles[static_cast<std::size_t>(k)];
    const double range = scan[static_cast<std::size_t>(k)].range;
    if (a > 0.0) left = std::min(left, range);
    if (a < 0.0) right = std::min(right, range);
  }
  const double angle = kProximityAngles[static_cast<std::size_t>(nearest)];
  if (std::abs(angle) <= std::numbers::pi / 6 + 1e-9) {
    bool turn_left = left > right;
    if (left == right) turn_left = angle <= 0.0;
    return turn_left ? WheelCommand{-half, half} : WheelCommand{half, -half};
  }
  constexpr double kVeerRate = 0.6;  // rad/s
  const double v = std::min(0.5 * (base.v_l + base.v_r), half);
  // Obstacle on the left (positive angle): veer right.
  const double omega = (base.v_r - base.v_l) / wheel_base + (angle > 0.0 ? -kVeerRate : kVeerRate);
  return {v - omega * wheel_base / 2.0, v + omega * wheel_base / 2.0};
}

Controller::Controller(const SimConstants& c, ControllerParams p) : c_(c), p_(p) {}

void Controller::set_failed() {
  task_ = ModeKind::Failed;
  mode_ = BehaviorMode{ModeKind::Failed};
  block_.reset();
  escape_ = EscapePhase::None;
}

void Controller::force_charging() {
  task_ = ModeKind::Charging;
  charge_full_ = true;
  block_.reset();
  escape_ = EscapePhase::None;
  stall_tracking_ = false;
  mode_ = BehaviorMode{ModeKind::Charging};
}

WheelCommand Controller::drive_to(Vec2 target, const ControlContext& ctx, double speed) const {
  const Vec2 d = target - ctx.nav;
  const double err = normalize_angle(std::atan2(d.y, d.x) - ctx.heading);
  const double half = 0.5 * c_.v_max;
  if (std::abs(err) > p_.rotate_threshold) {
    return err > 0.0 ? WheelCommand{-half, half} : WheelCommand{half, -half};
  }
  const double v = speed * std::cos(err);
  const double omega = std::clamp(p_.turn_gain * err, -p_.max_turn_rate, p_.max_turn_rate);
  double vl = v - omega * c_.wheel_base / 2.0;
  double vr = v + omega * c_.wheel_base / 2.0;
  const double peak = std::max(std::abs(vl), std::abs(vr));
  if (peak > c_.v_max) {
    vl *= c_.v_max / peak;
    vr *= c_.v_max / peak;
  }
  return {vl, vr};
}

WheelCommand Controller::lane_command(double lane_y, double direction,
                                      const ControlContext& ctx) const {
  return drive_to({ctx.nav.x + direction * p_.lookahead, lane_y}, ctx, c_.v_max);
}

Vec2 Controller::slot_position(int self) const {
  return {p_.slot_x, p_.slot_y[static_cast<std::size_t>(self) % p_.slot_y.size()]};
}

std::optional<BlockId> Controller::approach_target(const ControlContext& ctx) const {
  const auto& frontier = ctx.world->frontier_blocks();
  if (frontier.empty()) return std::nullopt;
  int shallowest = frontier.front().row;
  for (const auto& b : frontier) shallowest = std::min(shallowest, b.row);
  std::vector<BlockId> row;
  for (const auto& b : frontier) {
    if (b.row == shallowest) row.push_back(b);
  }
  return select_block(row, ctx.nav.y, *ctx.world);
}

std::optional<BlockId> Controller::reachable_block(const ControlContext& ctx) const {
  std::vector<BlockId> reachable;
  for (const auto& b : ctx.world->frontier_blocks()) {
    if (ctx.world->distance_to_block(ctx.tool_position, b) <= c_.robot_radius + p_.tool_reach) {
      reachable.push_back(b);
    }
  }
  if (reachable.empty()) return std::nullopt;
  return select_block(reachable, ctx.nav.y, *ctx.world);
}

bool Controller::departure_turn(const ControlContext& ctx) const {
  if (ctx.nav.x >= 0.0) return true;
  const double mine = distance(ctx.nav, p_.zone_waypoint);
  const bool committed = mine < p_.departure_commit;
  for (std::size_t j = 0; j < ctx.peers->size(); ++j) {
    if (static_cast<int>(j) == ctx.self) continue;
    const PeerView& pv = (*ctx.peers)[j];
    if (!committed && pv.alive && pv.believed.norm() < p_.entrance_clearance) return false;
    if (!pv.alive || pv.mode.kind == ModeKind::Lost || pv.mode.task() != ModeKind::TransitToFace ||
        pv.believed.x >= 0.0) {
      continue;
    }
    const double theirs = distance(pv.believed, p_.zone_waypoint);
    if (theirs < mine - 1e-9 || (std::abs(theirs - mine) <= 1e-9 && static_cast<int>(j) < ctx.self)) {
      return false;
    }
  }
  return true;
}

WheelCommand Controller::outbound_command(const ControlContext& ctx) {
  if (!departure_turn(ctx)) {
    const Vec2 slot = slot_position(ctx.self);
    if (distance(ctx.nav, slot) < p_.slot_tolerance) return {};
    return drive_to(slot, ctx, c_.v_max);
  }
  const bool off_lane = ctx.nav.x < 0.0 && std::abs(ctx.nav.y - p_.zone_waypoint.y) > p_.funnel_tolerance;
  if (ctx.nav.x < p_.zone_waypoint.x - 0.05 || off_lane) {
    return drive_to(p_.zone_waypoint, ctx, c_.v_max);
  }
  if (const auto target = approach_target(ctx)) {
    const double fx = ctx.world->row_x0(target->row);
    if (ctx.nav.x > fx - p_.face_approach) {
      const double limit = ctx.world->corridor_half_width() - c_.robot_radius - p_.wall_margin;
      const double y = std::clamp(ctx.world->column_center_y(target->col), -limit, limit);
      return drive_to({fx + c_.block_size, y}, ctx, c_.v_max);
    }
  }
  return lane_command(p_.outbound_lane_y, 1.0, ctx);
}

WheelCommand Controller::return_command(const ControlContext& ctx) const {
  return lane_command(p_.inbound_lane_y, -1.0, ctx);
}

bool Controller::robot_close(const ControlContext& ctx) const {
  for (const auto& r : *ctx.scan) {
    if (r.kind == HitKind::Robot && r.range < c_.avoid_distance) return true;
  }
  return false;
}

void Controller::update_envelopes(const ControlContext& ctx) {
  const std::size_t n = ctx.peers->size();
  const double relax = p_.range_envelope_rate * std::max(0.0, ctx.t - envelope_t_);
  envelope_t_ = ctx.t;
  std::vector<RangeEnvelope> next(n + 1);
  const std::size_t prior = envelopes_.size();
  for (const auto& contact : *ctx.contacts) {
    const std::size_t k = contact.peer == kReference ? n : static_cast<std::size_t>(contact.peer);
    RangeEnvelope e{contact.measured, contact.measured, true};
    if (prior == n + 1 && envelopes_[k].valid) {
      e.hi = std::max(contact.measured, envelopes_[k].hi - relax);
      e.lo = std::min(contact.measured, envelopes_[k].lo + relax);
    }
    next[k] = e;
  }
  envelopes_ = std::move(next);
}

namespace {

// Linked anchors behind the robot that are staying put; a peer heading home
// is about to leave and cannot hold the chain.
template <typename Pick>
bool anchored_within(const ControlContext& ctx, const std::vector<RangeEnvelope>& env,
                     double limit, Pick pick) {
  const std::size_t n = ctx.peers->size();
  if (env.size() != n + 1) return false;
  if (env[n].valid && pick(env[n]) <= limit) return true;
  for (std::size_t j = 0; j < n; ++j) {
    if (!env[j].valid || pick(env[j]) > limit) continue;
    const PeerView& pv = (*ctx.peers)[j];
    if (pv.alive && pv.linked && pv.believed.x < ctx.nav.x &&
        pv.mode.task() != ModeKind::ReturnToBase) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool Controller::chain_hold(const ControlContext& ctx) const {
  return ctx.nav.x > 0.0 &&
         !anchored_within(ctx, envelopes_, c_.chain_link_range - p_.chain_margin,
                          [](const RangeEnvelope& e) { return e.hi; });
}

bool Controller::chain_broken(const ControlContext& ctx) const {
  return ctx.nav.x > 0.0 && !anchored_within(ctx, envelopes_, c_.chain_link_range,
                                             [](const RangeEnvelope& e) { return e.lo; });
}

bool Controller::spacing_hold(const ControlContext& ctx) const {
  for (const auto& contact : *ctx.contacts) {
    if (contact.peer == kReference || contact.measured >= c_.spacing_distance) continue;
    const PeerView& pv = (*ctx.peers)[static_cast<std::size_t>(contact.peer)];
    if (pv.alive && pv.believed.x >= 0.0 && pv.believed.x > ctx.nav.x) return true;
  }
  return false;
}

void Controller::begin_return(ReturnReason r) {
  task_ = ModeKind::ReturnToBase;
  reason_ = r;
  block_.reset();
}

void Controller::after_deposit(const ControlContext& ctx) {
  const bool flagged = ctx.flags[0] || ctx.flags[1] || ctx.flags[2];
  if (reason_ == ReturnReason::Deposit && !flagged && ctx.battery >= c_.charge_cutoff) {
    task_ = ModeKind::TransitToFace;
    return;
  }
  if (reason_ == ReturnReason::LowPower || ctx.battery < c_.charge_cutoff) charge_full_ = true;
  task_ = ModeKind::InZoneIdle;
}

bool Controller::update_stall(const ControlContext& ctx, bool moving) {
  if (!moving) {
    stall_tracking_ = false;
    return false;
  }
  if (!stall_tracking_ || distance(ctx.odometry, stall_anchor_) >= p_.stall_distance) {
    stall_tracking_ = true;
    stall_anchor_ = ctx.odometry;
    stall_since_ = ctx.t;
    return false;
  }
  return ctx.t - stall_since_ >= p_.stall_window;
}

Decision Controller::step(const ControlContext& ctx, RandomStream& yaw_rng) {
  Decision d;
  if (task_ == ModeKind::Failed) {
    mode_ = BehaviorMode{ModeKind::Failed};
    return d;
  }
  update_envelopes(ctx);
  const bool flagged = ctx.flags[0] || ctx.flags[1] || ctx.flags[2];
  const bool full = ctx.payload >= c_.robot_mass - 1e-12;

  // Return-to-base overrides the excavation loop.
  const bool interruptible = task_ == ModeKind::TransitToFace || task_ == ModeKind::Excavating ||
                             (task_ == ModeKind::ReturnToBase && reason_ == ReturnReason::Deposit);
  if (interruptible) {
    if (ctx.battery < c_.charge_cutoff) {
      begin_return(ReturnReason::LowPower);
    } else if (flagged) {
      begin_return(ReturnReason::MaintenanceNeeded);
    }
  }

  if (task_ == ModeKind::TransitToFace) {
    if (full) {
      begin_return(ReturnReason::Deposit);
    } else if (auto b = reachable_block(ctx)) {
      task_ = ModeKind::Excavating;
      block_ = b;
    }
  }
  if (task_ == ModeKind::Excavating) {
    if (full) {
      begin_return(ReturnReason::Deposit);
    } else if (!block_ || !ctx.world->is_frontier(*block_) ||
               ctx.world->distance_to_block(ctx.tool_position, *block_) >
                   c_.robot_radius + p_.tool_reach) {
      block_ = reachable_block(ctx);
      if (!block_) task_ = ModeKind::TransitToFace;
    }
  }
  // Avoidance can push an idle robot over the zone edge.
  if (task_ == ModeKind::InZoneIdle && !ctx.in_zone && ctx.battery < c_.charge_cutoff) {
    begin_return(ReturnReason::LowPower);
  }
  if (task_ == ModeKind::ReturnToBase && ctx.in_zone &&
      ctx.nav.x < -(c_.robot_radius + p_.deposit_margin)) {
    d.deposit = ctx.payload > 0.0;
    after_deposit(ctx);
  }
  if (task_ == ModeKind::InZoneIdle && distance(ctx.nav, slot_position(ctx.self)) < p_.slot_tolerance) {
    if (flagged) {
      task_ = ModeKind::UnderMaintenance;
    } else if (charge_full_ || ctx.battery < c_.charge_cutoff) {
      charge_full_ = true;
      task_ = ModeKind::Charging;
    } else {
      task_ = ModeKind::TransitToFace;
    }
  }
  if (task_ == ModeKind::UnderMaintenance && !flagged) {
    if (charge_full_ || ctx.battery < c_.charge_cutoff) {
      charge_full_ = true;
      task_ = ModeKind::Charging;
    } else {
      task_ = ModeKind::TransitToFace;
    }
  }
  if (task_ == ModeKind::Charging && ctx.battery >= 1.0 - 1e-9) {
    charge_full_ = false;
    task_ = flagged ? ModeKind::UnderMaintenance : ModeKind::TransitToFace;
  }

  // Fall back toward base when the link behind has moved out of range.
  const bool retreat = (task_ == ModeKind::TransitToFace || task_ == ModeKind::Excavating) &&
                       chain_broken(ctx);
  if (retreat && task_ == ModeKind::Excavating) {
    task_ = ModeKind::TransitToFace;
    block_.reset();
  }

  WheelCommand base;
  switch (task_) {
    case ModeKind::TransitToFace: base = outbound_command(ctx); break;
    case ModeKind::ReturnToBase: base = return_command(ctx); break;
    case ModeKind::InZoneIdle: base = drive_to(slot_position(ctx.self), ctx, c_.v_max); break;
    default: break;
  }

  BehaviorMode task_mode{task_, reason_, task_, reason_};
  auto overlay = [&](ModeKind k) { return BehaviorMode{k, reason_, task_, reason_}; };

  if (ctx.lost && task_ != ModeKind::Charging && task_ != ModeKind::UnderMaintenance) {
    escape_ = EscapePhase::None;
    stall_tracking_ = false;
    mode_ = overlay(ModeKind::Lost);
    return d;
  }

  if (escape_ != EscapePhase::None) {
    const double half = 0.5 * c_.v_max;
    if (escape_ == EscapePhase::Reverse &&
        (distance(ctx.odometry, escape_start_) >= p_.escape_reverse ||
         ctx.t - escape_started_ >= p_.escape_timeout)) {
      escape_ = EscapePhase::Yaw;
      escape_started_ = ctx.t;
      yaw_target_ = normalize_angle(ctx.heading +
                                    yaw_rng.uniform(-std::numbers::pi / 6, std::numbers::pi / 6));
    }
    if (escape_ == EscapePhase::Yaw) {
      const double err = normalize_angle(yaw_target_ - ctx.heading);
      if (std::abs(err) < 0.05 || ctx.t - escape_started_ >= p_.escape_timeout) {
        escape_ = EscapePhase::None;
        stall_tracking_ = false;
      } else {
        d.command = err > 0.0 ? WheelCommand{-half, half} : WheelCommand{half, -half};
      }
    } else {
      d.command = {-half, -half};
    }
    if (escape_ != EscapePhase::None) {
      mode_ = overlay(ModeKind::Avoiding);
      return d;
    }
  }

  const bool moving = !base.is_zero();
  const bool turning_in_place = moving && base.v_l == -base.v_r;
  if (moving && !turning_in_place && robot_close(ctx)) {
    d.command = avoidance_command(*ctx.scan, base, c_.v_max, c_.wheel_base, c_.avoid_distance);
    mode_ = overlay(ModeKind::Avoiding);
    if (d.command.v_l == -d.command.v_r) avoid_until_ = ctx.t + p_.avoid_commit;
  } else if (moving && ctx.t < avoid_until_) {
    // Keep clear of the robot just avoided before steering back.
    d.command = {0.5 * c_.v_max, 0.5 * c_.v_max};
    mode_ = overlay(ModeKind::Avoiding);
  } else if (retreat) {
    d.command = {-c_.v_max, -c_.v_max};
    mode_ = overlay(ModeKind::HoldChain);
  } else if (task_ == ModeKind::TransitToFace && moving) {
    const bool outward = 0.5 * (base.v_l + base.v_r) > 0.0 && std::cos(ctx.heading) > 0.0;
    if (outward && chain_hold(ctx)) {
      mode_ = overlay(ModeKind::HoldChain);
    } else if (spacing_hold(ctx) &&
               (ctx.nav.x >= 0.0 || distance(ctx.nav, p_.zone_waypoint) < p_.slot_tolerance)) {
      mode_ = overlay(ModeKind::HoldSpacing);
    } else {
      d.command = base;
      mode_ = task_mode;
    }
  } else {
    d.command = base;
    mode_ = task_mode;
  }

  if (task_ == ModeKind::Excavating && block_) {
    d.excavate = true;
    d.block = block_;
  }

  if (update_stall(ctx, !d.command.is_zero())) {
    escape_ = EscapePhase::Reverse;
    escape_start_ = ctx.odometry;
    escape_started_ = ctx.t;
    stall_tracking_ = false;
    d.command = {-0.5 * c_.v_max, -0.5 * c_.v_max};
    mode_ = overlay(ModeKind::Avoiding);
  }
  return d;
}

}  // namespace tunnelswarm
