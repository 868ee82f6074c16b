#include "tunnelswarm/kinematics.hpp"

#include <cmath>
#include <numbers>

namespace tunnelswarm {

const std::array<double, kProximityRays> kProximityAngles = {
    -std::numbers::pi / 2, -std::numbers::pi / 3, -std::numbers::pi / 6, 0.0,
    std::numbers::pi / 6,  std::numbers::pi / 3,  std::numbers::pi / 2,
};

Pose step_pose(const Pose& pose, const WheelCommand& achieved, double dt, double wheel_base) {
  const double v = 0.5 * (achieved.v_l + achieved.v_r);
  const double omega = (achieved.v_r - achieved.v_l) / wheel_base;
  Pose out = pose;
  if (std::abs(omega) < 1e-9) {
    out.x += v * std::cos(pose.theta) * dt;
    out.y += v * std::sin(pose.theta) * dt;
  } else {
    const double theta1 = pose.theta + omega * dt;
    const double radius = v / omega;
    out.x += radius * (std::sin(theta1) - std::sin(pose.theta));
    out.y -= radius * (std::cos(theta1) - std::cos(pose.theta));
    out.theta = theta1;
  }
  out.theta = normalize_angle(out.theta);
  return out;
}

double ray_disc(Vec2 p, Vec2 dir, Vec2 q, double radius, double max) {
  const Vec2 w = q - p;
  const double along = w.dot(dir);
  const double perp2 = w.norm2() - along * along;
  const double r2 = radius * radius;
  if (w.norm2() <= r2) return 0.0;
  if (along <= 0.0 || perp2 > r2) return max;
  const double t = along - std::sqrt(r2 - perp2);
  return std::min(t, max);
}

ProximityScan proximity_scan(int self, const std::vector<Pose>& poses, const World& world,
                             double radius, double max_range) {
  ProximityScan scan;
  const Pose& me = poses[static_cast<std::size_t>(self)];
  const Vec2 p = me.position();
  for (int k = 0; k < kProximityRays; ++k) {
    const Vec2 dir = unit(me.theta + kProximityAngles[static_cast<std::size_t>(k)]);
    ProximityReading reading{max_range, HitKind::None, -1};
    const double wall = world.cast_static(p, dir, max_range);
    if (wall < reading.range) reading = {wall, HitKind::Static, -1};
    for (std::size_t j = 0; j < poses.size(); ++j) {
      if (static_cast<int>(j) == self) continue;
      const Vec2 q = poses[j].position();
      if (distance(p, q) > max_range + radius) continue;
      const double t = ray_disc(p, dir, q, radius, max_range);
      if (t < reading.range) reading = {t, HitKind::Robot, static_cast<int>(j)};
    }
    scan[static_cast<std::size_t>(k)] = reading;
  }
  return scan;
}

namespace {

bool position_free(std::size_t i, Vec2 c, const std::vector<Pose>& resolved,
                   const std::vector<Pose>& previous, const World& world, double radius) {
  if (!world.disc_free(c, radius)) return false;
  const double min_d2 = 4.0 * radius * radius - 1e-12;
  for (std::size_t j = 0; j < previous.size(); ++j) {
    if (j == i) continue;
    const Vec2 q = j < i ? resolved[j].position() : previous[j].position();
    if ((c - q).norm2() < min_d2) return false;
  }
  return true;
}

}  // namespace

std::vector<Pose> resolve_collisions(const std::vector<Pose>& previous,
                                     const std::vector<Pose>& proposed, const World& world,
                                     double radius) {
  std::vector<Pose> resolved = proposed;
  for (std::size_t i = 0; i < proposed.size(); ++i) {
    const Vec2 from = previous[i].position();
    const Vec2 to = proposed[i].position();
    if (from == to) continue;
    if (position_free(i, to, resolved, previous, world, radius)) continue;
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 40; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (position_free(i, from + (to - from) * mid, resolved, previous, world, radius)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const Vec2 stop = lo > 0.0 ? from + (to - from) * lo : from;
    resolved[i].x = stop.x;
    resolved[i].y = stop.y;
  }
  return resolved;
}

bool configuration_valid(const std::vector<Pose>& poses, const World& world, double radius,
                         double tolerance) {
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Vec2 p = poses[i].position();
    if (world.static_distance(p) < radius - tolerance) return false;
    for (std::size_t j = i + 1; j < poses.size(); ++j) {
      if (distance(p, poses[j].position()) < 2.0 * radius - tolerance) return false;
    }
  }
  return true;
}

}  // namespace tunnelswarm
