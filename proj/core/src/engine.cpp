#include "tunnelswarm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace tunnelswarm {

Pose initial_pose(int i, int n) {
  if (n <= 10) {
    const double f = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
    return {-1.5 + 1.0 * f, -0.8 + 1.6 * f, 0.0};
  }
  constexpr int kPerRow = 7;
  return {-1.75 + 0.25 * (i / kPerRow), -0.75 + 0.25 * (i % kPerRow), 0.0};
}

Simulation::Simulation(const ScenarioSpec& spec, int replicate, EngineOptions options)
    : spec_(spec), c_(spec.constants), options_(std::move(options)), world_(c_) {
  spec_.validate();
  const auto rep = static_cast<std::uint64_t>(replicate);
  RandomStream scenario_rng(stream_seed(spec.seed, rep, -1, "scenario"));
  plan_ = InjectionPlan::resolve(spec_, scenario_rng);
  beacon_ = {{0.0, 0.0}, c_.d_max};

  const int n = spec_.n_robots;
  robots_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RobotState r{.id = i,
                 .pose = initial_pose(i, n),
                 .monitor = PfddrMonitor(c_),
                 .controller = Controller(c_, options_.controller)};
    r.nav = r.pose.position();
    r.range = c_.d_max;
    robots_.push_back(std::move(r));
    streams_.push_back({RandomStream(stream_seed(spec.seed, rep, i, "injection")),
                        RandomStream(stream_seed(spec.seed, rep, i, "power-noise")),
                        RandomStream(stream_seed(spec.seed, rep, i, "dc-noise")),
                        RandomStream(stream_seed(spec.seed, rep, i, "localization")),
                        RandomStream(stream_seed(spec.seed, rep, i, "escape-yaw")),
                        RandomStream(stream_seed(spec.seed, rep, i, "ultrasonic"))});
    injection_rngs_.push_back(streams_.back().injection);
  }
  held_range_noise_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  contacts_.resize(static_cast<std::size_t>(n));
  handshake_.resize(static_cast<std::size_t>(n));
  total_ticks_ = static_cast<std::uint64_t>(c_.total_ticks());
  tail_ticks_ = static_cast<std::uint64_t>(std::llround(kTailSeconds * c_.tick_rate));
  if (options_.trace) *options_.trace << kTraceHeader << '\n';
}

std::vector<CommsNode> Simulation::comms_nodes() const {
  std::vector<CommsNode> nodes;
  nodes.reserve(robots_.size());
  for (const auto& r : robots_) nodes.push_back({r.pose.position(), r.nav, r.range, !r.failed});
  return nodes;
}

void Simulation::stage_comms(bool sample) {
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    auto& r = robots_[i];
    if (r.failed) continue;
    r.range = sensing_range(effective_dc(r.dc.dc_s, streams_[i].dc.normal()), c_);
    if (sample) {
      for (double& v : held_range_noise_[i]) v = streams_[i].ultrasonic.normal();
    }
  }
  const auto nodes = comms_nodes();
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    contacts_[i] = ultrasonic_contacts(static_cast<int>(i), nodes, beacon_, held_range_noise_[i],
                                       kNoiseFraction);
  }
  chain_ = compute_chain(nodes, beacon_, c_.chain_link_range);
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    handshake_[i].reset();
    auto& r = robots_[i];
    if (!sample || r.failed) continue;
    auto& loc = streams_[i].localization;
    const double draw = loc.normal();
    const double angle = loc.uniform(-std::numbers::pi, std::numbers::pi);
    const auto est = estimate_position(r.pose.position(), contacts_[i], chain_, draw, angle,
                                       kNoiseFraction);
    r.lost = !est.has_value();
    if (est) r.nav = r.nav + (*est - r.nav) * 0.1;
    handshake_[i] = handshake_sample(static_cast<int>(i), nodes, beacon_, c_.chain_link_range);
  }
}

void Simulation::tick() {
  const double dt = c_.dt();
  const double t = time();
  const std::size_t n = robots_.size();
  const long tps = c_.ticks_per_second();
  const bool sample = tick_ % static_cast<std::uint64_t>(tps / 10) == 0;

  // 1. Fault injection once per simulated second.
  if (tick_ % static_cast<std::uint64_t>(tps) == 0) {
    std::vector<DegradationState> states(n);
    std::vector<bool> eligible(n);
    for (std::size_t i = 0; i < n; ++i) {
      states[i] = robots_[i].dc;
      eligible[i] = !robots_[i].failed &&
                    robots_[i].controller.mode().kind != ModeKind::UnderMaintenance;
    }
    inject_second(plan_, states, eligible, injection_rngs_);
    for (std::size_t i = 0; i < n; ++i) robots_[i].dc = states[i];
  }

  // 2. Ranging, chain, localisation and handshakes.
  stage_comms(sample);

  // 3. Decisions.
  std::vector<PeerView> peers(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& r = robots_[j];
    peers[j] = {r.nav, r.battery, r.payload, r.controller.mode(), chain_.linked[j], !r.failed};
  }
  std::vector<Pose> poses(n);
  for (std::size_t i = 0; i < n; ++i) poses[i] = robots_[i].pose;

  std::vector<Decision> decisions(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = robots_[i];
    if (r.failed) continue;
    const ProximityScan scan =
        proximity_scan(static_cast<int>(i), poses, world_, c_.robot_radius, c_.proximity_range);
    ControlContext ctx;
    ctx.self = static_cast<int>(i);
    ctx.t = t;
    ctx.nav = r.nav;
    ctx.heading = r.pose.theta;
    ctx.lost = r.lost;
    ctx.in_zone = world_.zone_of(r.pose.position()) == Region::MaintenanceZone;
    ctx.battery = r.battery;
    ctx.payload = r.payload;
    ctx.linked = chain_.linked[i];
    ctx.flags = {r.monitor.flagged(PfddrCategory::Sensing),
                 r.monitor.flagged(PfddrCategory::Locomotion),
                 r.monitor.flagged(PfddrCategory::Excavation)};
    ctx.scan = &scan;
    ctx.contacts = &contacts_[i];
    ctx.peers = &peers;
    ctx.world = &world_;
    ctx.tool_position = r.pose.position();
    ctx.odometry = r.pose.position();
    ctx.constants = &c_;
    Decision d = r.controller.step(ctx, streams_[i].escape);
    if (options_.check_invariants && !ctx.lost && !ctx.in_zone && ctx.battery < c_.charge_cutoff &&
        r.controller.mode().task() != ModeKind::ReturnToBase) {
      priority_failure_ = "low battery without return, robot " + std::to_string(r.id);
    }
    if (d.deposit && ctx.in_zone) r.payload = 0.0;
    if (r.battery <= 0.0) d = Decision{};
    decisions[i] = d;
  }

  // 4. Physical output of degraded hardware.
  std::vector<Pose> proposed = poses;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = robots_[i];
    r.excavating = false;
    r.command = {};
    r.achieved = {};
    if (r.failed) continue;
    auto& rng = streams_[i].dc;
    const double eff_l = effective_dc(r.dc.dc_l, rng.normal());
    const double eff_r = effective_dc(r.dc.dc_r, rng.normal());
    const double eff_e = effective_dc(r.dc.dc_E, rng.normal());
    const double ratio = LoadState{r.payload}.load_ratio(c_.robot_mass);
    const Decision& d = decisions[i];
    r.command = d.command;
    r.achieved = {d.command.v_l * wheel_velocity_factor(eff_l, ratio, c_),
                  d.command.v_r * wheel_velocity_factor(eff_r, ratio, c_)};
    if (d.excavate && d.block && world_.is_frontier(*d.block)) {
      r.excavating = true;
      const double capacity = std::max(0.0, c_.robot_mass - r.payload);
      const double mass = std::min(excavation_rate(eff_e, c_) * dt, capacity);
      const double applied = std::min(mass, world_.remaining_mass(*d.block));
      world_.excavate(*d.block, mass);
      r.payload = std::min(c_.robot_mass, r.payload + applied);
    }
    proposed[i] = step_pose(r.pose, r.achieved, dt, c_.wheel_base);
  }

  // 5. Motion with collision truncation; odometry follows the true displacement.
  const std::vector<Pose> resolved = resolve_collisions(poses, proposed, world_, c_.robot_radius);
  const bool in_tail = tick_ + tail_ticks_ >= total_ticks_;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = robots_[i];
    const Vec2 step = resolved[i].position() - r.pose.position();
    r.nav = r.nav + step;
    if (in_tail) r.tail_path += step.norm();
    r.pose = resolved[i];
  }

  // 6-9. Power, failure, PFDDR and maintenance.
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = robots_[i];
    if (r.failed) continue;
    auto& rng = streams_[i].power;
    const std::array<double, 4> noise{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const std::array<bool, 2> active{r.command.v_l != 0.0, r.command.v_r != 0.0};
    const PowerRates rates = power_rates(r.dc, LoadState{r.payload}, active, r.excavating, noise, c_);
    const double drawn = std::min(r.battery, rates.total() * dt);
    r.battery -= drawn;
    r.consumed += drawn;

    const bool in_zone = world_.zone_of(r.pose.position()) == Region::MaintenanceZone;
    if (in_zone && r.controller.mode().kind == ModeKind::Charging) {
      const double added = std::min(c_.recharge_rate * dt, 1.0 - r.battery);
      r.battery += added;
      r.recharged += added;
    }

    if (r.battery <= 0.0) {
      r.battery = 0.0;
      if (in_zone) {
        r.controller.force_charging();
      } else {
        r.failed = true;
        r.failed_at = t + dt;
        r.controller.set_failed();
        r.lost = false;
        ++depleted_;
        continue;
      }
    }

    if (spec_.pfddr_enabled) {
      PfddrTick in;
      in.locomotion_rate = rates.locomotion();
      in.wheels = active[0] && active[1] ? WheelPattern::Both
                  : active[0] || active[1] ? WheelPattern::One
                                           : WheelPattern::None;
      in.loaded = r.payload > kLoadedPayloadFraction * c_.robot_mass;
      in.excavating = r.excavating;
      in.excavation_rate = rates.excavation;
      in.handshake_bit = handshake_[i];
      for (PfddrCategory cat : r.monitor.accumulate_tick(in)) {
        detections_.push_back({t, r.id, cat, dc_snapshot(cat, r.dc)});
      }
    }

    if (r.controller.mode().kind == ModeKind::UnderMaintenance && in_zone) {
      r.maintenance_timer += dt;
      if (r.maintenance_timer >= c_.maintenance_duration - 1e-9) {
        r.maintenance_timer = 0.0;
        if (const auto cat = r.monitor.first_flag()) {
          r.monitor.complete_maintenance(*cat, r.dc, true);
          ++r.maintenance_services;
        }
      }
    } else {
      r.maintenance_timer = 0.0;
    }
    if (r.lost) r.lost_time += dt;
  }

  ++tick_;
  if (options_.check_invariants) check_invariants();
  if (options_.trace && tick_ % static_cast<std::uint64_t>(std::max(1, options_.trace_every)) == 0) {
    write_trace();
  }
}

void Simulation::check_invariants() {
  std::string failure;
  std::vector<Pose> poses;
  poses.reserve(robots_.size());
  for (const auto& r : robots_) poses.push_back(r.pose);
  if (!configuration_valid(poses, world_, c_.robot_radius, 1e-9)) failure = "overlap";
  for (const auto& r : robots_) {
    if (r.battery < 0.0 || r.battery > 1.0 + 1e-12) failure = "battery out of range";
    if (std::abs(r.battery - (1.0 - r.consumed + r.recharged)) > 1e-9) failure = "energy identity";
    if (r.payload < 0.0 || r.payload > c_.robot_mass + 1e-12) failure = "payload out of range";
  }
  const double expected = world_.blocks_excavated() * world_.block_mass() + world_.partial_mass_removed();
  if (std::abs(world_.mass_removed() - expected) > 1e-6) failure = "mass conservation";
  if (failure.empty()) failure = std::move(priority_failure_);
  priority_failure_.clear();
  if (!failure.empty()) {
    if (invariant_failures_ == 0) {
      first_invariant_failure_ = failure + " at t=" + std::to_string(time());
    }
    ++invariant_failures_;
  }
}

void Simulation::write_trace() {
  char buf[320];
  for (const auto& r : robots_) {
    const auto& m = r.controller.mode();
    std::snprintf(buf, sizeof buf,
                  "%.2f,%d,%.4f,%.4f,%.4f,%.4f,%.4f,%.5f,%.4f,%s,%s,%d,%.3f,%.3f,%.3f,%.3f\n",
                  time(), r.id, r.pose.x, r.pose.y, r.pose.theta, r.nav.x, r.nav.y, r.battery,
                  r.payload, std::string(to_string(m.kind)).c_str(),
                  std::string(to_string(m.task())).c_str(), chain_.linked[static_cast<std::size_t>(r.id)] ? 1 : 0,
                  r.dc.dc_s, r.dc.dc_l, r.dc.dc_r, r.dc.dc_E);
    *options_.trace << buf;
  }
}

RunMetrics Simulation::metrics() const {
  RunMetrics m;
  m.blocks_excavated = world_.blocks_excavated();
  m.robots_depleted = depleted_;
  m.tunnel_depth = world_.tunnel_depth();
  m.detections = detections_;
  m.ticks = tick_;
  m.invariant_failures = invariant_failures_;
  m.first_invariant_failure = first_invariant_failure_;
  double consumed = 0.0;
  for (const auto& r : robots_) {
    consumed += r.consumed;
    RobotSummary s;
    s.final_dc = r.dc;
    s.failed = r.failed;
    s.failed_at = r.failed_at;
    s.battery = r.battery;
    s.payload = r.payload;
    s.consumed = r.consumed;
    s.recharged = r.recharged;
    const double ratio = LoadState{r.payload}.load_ratio(c_.robot_mass);
    s.speed_fraction = 0.5 * (wheel_velocity_factor(r.dc.dc_l, ratio, c_) +
                              wheel_velocity_factor(r.dc.dc_r, ratio, c_));
    const double tail = std::min(tail_ticks_, tick_) * c_.dt();
    s.final_speed_fraction = tail > 0.0 ? r.tail_path / (tail * c_.v_max) : 0.0;
    s.maintenance_services = r.maintenance_services;
    s.lost_time = r.lost_time;
    m.robots.push_back(s);
  }
  m.power_consumed_pct = 100.0 * consumed / c_.battery_capacity;
  return m;
}

RunMetrics Simulation::run() {
  while (!done()) tick();
  return metrics();
}

RunMetrics run_replicate(const ScenarioSpec& spec, int replicate, EngineOptions options) {
  Simulation sim(spec, replicate, std::move(options));
  return sim.run();
}

}  // namespace tunnelswarm
