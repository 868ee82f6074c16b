#pragma once

#include <array>
#include <vector>

#include "tunnelswarm/geometry.hpp"
#include "tunnelswarm/world.hpp"

namespace tunnelswarm {

struct WheelCommand {
  double v_l = 0.0;
  double v_r = 0.0;

  bool is_zero() const { return v_l == 0.0 && v_r == 0.0; }
  friend bool operator==(const WheelCommand&, const WheelCommand&) = default;
};

/// Differential-drive integration along the exact arc.
Pose step_pose(const Pose& pose, const WheelCommand& achieved, double dt, double wheel_base);

inline constexpr int kProximityRays = 7;
/// Ray angles relative to heading, from -90 to +90 degrees.
extern const std::array<double, kProximityRays> kProximityAngles;

enum class HitKind { None, Static, Robot };

struct ProximityReading {
  double range = 0.0;
  HitKind kind = HitKind::None;
  int robot = -1;
};

using ProximityScan = std::array<ProximityReading, kProximityRays>;

/// Distance along the ray from p to the disc (q, radius), or `max` on a miss.
double ray_disc(Vec2 p, Vec2 dir, Vec2 q, double radius, double max);

/// Scans from the centre of robot `self`. Every other robot, failed or not,
/// is an obstacle.
ProximityScan proximity_scan(int self, const std::vector<Pose>& poses, const World& world,
                             double radius, double max_range);

/// Truncates each robot's move at first contact, in ascending id order.
/// Lower ids are tested at their resolved positions and higher ids at their
/// previous ones. Headings are taken from `proposed` unchanged.
std::vector<Pose> resolve_collisions(const std::vector<Pose>& previous,
                                     const std::vector<Pose>& proposed, const World& world,
                                     double radius);

/// True when no disc overlaps soil, walls or another disc.
bool configuration_valid(const std::vector<Pose>& poses, const World& world, double radius,
                         double tolerance = 1e-9);

}  // namespace tunnelswarm
