#include "tunnelswarm/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tunnelswarm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double point_rect_distance(Vec2 p, double x0, double x1, double y0, double y1) {
  const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
  const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
  return std::hypot(dx, dy);
}

// Parameter at which the ray p + t*d meets segment ab, or infinity.
double ray_segment(Vec2 p, Vec2 d, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double denom = d.cross(e);
  if (std::abs(denom) < 1e-15) return kInf;
  const Vec2 ap = a - p;
  const double t = ap.cross(e) / denom;
  const double u = ap.cross(d) / denom;
  if (t < 0.0 || u < -1e-12 || u > 1.0 + 1e-12) return kInf;
  return t;
}

// Entry parameter of the ray into an axis-aligned rectangle, or infinity.
double ray_rect(Vec2 p, Vec2 d, double x0, double x1, double y0, double y1) {
  double tmin = 0.0;
  double tmax = kInf;
  const double lo[2] = {x0, y0};
  const double hi[2] = {x1, y1};
  const double o[2] = {p.x, p.y};
  const double v[2] = {d.x, d.y};
  for (int k = 0; k < 2; ++k) {
    if (std::abs(v[k]) < 1e-15) {
      if (o[k] < lo[k] || o[k] > hi[k]) return kInf;
      continue;
    }
    double t0 = (lo[k] - o[k]) / v[k];
    double t1 = (hi[k] - o[k]) / v[k];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return kInf;
  }
  return tmin;
}

}  // namespace

World::World(const SimConstants& c)
    : rows_(c.soil_rows),
      cols_(c.soil_columns()),
      block_(c.block_size),
      block_mass_(c.robot_mass),
      face_x_(c.excavation_zone_offset),
      corridor_half_(0.5 * c.corridor_width),
      zone_back_(-c.zone_length),
      zone_half_(0.5 * c.zone_width),
      proximity_range_(c.proximity_range),
      remaining_(static_cast<std::size_t>(rows_ * cols_), c.robot_mass) {
  const double h = corridor_half_;
  const double w = zone_half_;
  const double end = end_x();
  walls_ = {
      {{zone_back_, -w}, {zone_back_, w}},
      {{zone_back_, w}, {0.0, w}},
      {{zone_back_, -w}, {0.0, -w}},
      {{0.0, h}, {0.0, w}},
      {{0.0, -w}, {0.0, -h}},
      {{0.0, h}, {end, h}},
      {{0.0, -h}, {end, -h}},
      {{end, -h}, {end, h}},
  };
  rebuild_frontier();
}

bool World::is_frontier(BlockId b) const {
  if (!in_grid(b) || !occupied(b)) return false;
  return b.row == 0 || !occupied({b.row - 1, b.col});
}

void World::rebuild_frontier() {
  frontier_.clear();
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (is_frontier({r, c})) frontier_.push_back({r, c});
    }
  }
}

ExcavateResult World::excavate(BlockId b, double mass) {
  if (!is_frontier(b)) {
    throw NotFrontier("block (" + std::to_string(b.row) + ", " + std::to_string(b.col) +
                      ") is not a frontier block");
  }
  double& rem = remaining_[index(b)];
  const double applied = std::min(std::max(mass, 0.0), rem);
  if (applied >= rem) {
    mass_removed_ += rem;
    rem = 0.0;
    ++blocks_excavated_;
    rebuild_frontier();
    return ExcavateResult::Completed;
  }
  rem -= applied;
  mass_removed_ += applied;
  return ExcavateResult::InProgress;
}

double World::partial_mass_removed() const {
  double sum = 0.0;
  for (double rem : remaining_) {
    if (rem > 0.0) sum += block_mass_ - rem;
  }
  return sum;
}

double World::tunnel_depth() const {
  int cleared = 0;
  for (int r = 0; r < rows_; ++r) {
    bool empty = true;
    for (int c = 0; c < cols_ && empty; ++c) empty = !occupied({r, c});
    if (!empty) break;
    ++cleared;
  }
  return cleared * block_;
}

bool World::inside_free_region(Vec2 p) const {
  const bool in_zone = p.x >= zone_back_ && p.x <= 0.0 && std::abs(p.y) <= zone_half_;
  const bool in_corridor = p.x >= 0.0 && p.x <= end_x() && std::abs(p.y) <= corridor_half_;
  if (!in_zone && !in_corridor) return false;
  if (p.x < face_x_ || p.x >= end_x()) return true;
  const int r = static_cast<int>(std::floor((p.x - face_x_) / block_));
  const int c = std::clamp(static_cast<int>(std::floor((p.y + corridor_half_) / block_)), 0, cols_ - 1);
  return !(in_grid({r, c}) && occupied({r, c}));
}

Region World::zone_of(Vec2 p) const {
  if (!inside_free_region(p)) return Region::Obstacle;
  if (p.x < 0.0) return Region::MaintenanceZone;
  if (p.x < face_x_) return Region::CorridorTransit;
  return Region::ExcavationZone;
}

double World::static_distance(Vec2 p) const {
  if (!inside_free_region(p)) return -1.0;
  double best = kInf;
  for (const auto& s : walls_) best = std::min(best, point_segment_distance(p, s.a, s.b));
  // Walls are never farther than 1 m, so only nearby rows can matter.
  const int r0 = std::max(0, static_cast<int>(std::floor((p.x - best - face_x_) / block_)));
  const int r1 = std::min(rows_ - 1, static_cast<int>(std::floor((p.x + best - face_x_) / block_)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (!occupied({r, c})) continue;
      const double x0 = row_x0(r);
      const double y0 = -corridor_half_ + c * block_;
      best = std::min(best, point_rect_distance(p, x0, x0 + block_, y0, y0 + block_));
    }
  }
  return best;
}

bool World::disc_free(Vec2 center, double radius) const {
  return static_distance(center) >= radius - 1e-12;
}

double World::distance_to_block(Vec2 p, BlockId b) const {
  const double x0 = row_x0(b.row);
  const double y0 = -corridor_half_ + b.col * block_;
  return point_rect_distance(p, x0, x0 + block_, y0, y0 + block_);
}

double World::cast_static(Vec2 p, Vec2 dir, double max) const {
  double best = max;
  for (const auto& s : walls_) best = std::min(best, ray_segment(p, dir, s.a, s.b));
  const double xa = std::min(p.x, p.x + dir.x * best);
  const double xb = std::max(p.x, p.x + dir.x * best);
  const int r0 = std::max(0, static_cast<int>(std::floor((xa - face_x_) / block_)));
  const int r1 = std::min(rows_ - 1, static_cast<int>(std::floor((xb - face_x_) / block_)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (!occupied({r, c})) continue;
      const double x0 = row_x0(r);
      const double y0 = -corridor_half_ + c * block_;
      best = std::min(best, ray_rect(p, dir, x0, x0 + block_, y0, y0 + block_));
    }
  }
  return best;
}

double World::static_clearance(Vec2 p, double heading, double ray_angle) const {
  return cast_static(p, unit(heading + ray_angle), proximity_range_);
}

std::string World::raster() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(rows_ * (cols_ + 1)));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const double rem = remaining_[index({r, c})];
      out.push_back(rem <= 0.0 ? '.' : rem < block_mass_ ? '+' : '#');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace tunnelswarm
