#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "tunnelswarm/constants.hpp"
#include "tunnelswarm/geometry.hpp"

namespace tunnelswarm {

struct BlockId {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const BlockId&, const BlockId&) = default;
};

enum class Region { MaintenanceZone, CorridorTransit, ExcavationZone, Obstacle };

enum class ExcavateResult { InProgress, Completed };

class NotFrontier : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Zone and corridor geometry plus the soil blocks filling the far end of
/// the corridor. Row 0 starts at the excavation-zone boundary; column 0 is
/// at the -y wall.
class World {
 public:
  explicit World(const SimConstants& c = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool in_grid(BlockId b) const { return b.row >= 0 && b.row < rows_ && b.col >= 0 && b.col < cols_; }
  bool occupied(BlockId b) const { return remaining_[index(b)] > 0.0; }
  double remaining_mass(BlockId b) const { return remaining_[index(b)]; }

  bool is_frontier(BlockId b) const;
  /// Occupied cells exposed toward the entrance, sorted by (row, col).
  const std::vector<BlockId>& frontier_blocks() const { return frontier_; }
  /// Removes mass from a frontier block; throws NotFrontier otherwise.
  ExcavateResult excavate(BlockId b, double mass);

  int blocks_excavated() const { return blocks_excavated_; }
  double mass_removed() const { return mass_removed_; }
  /// Sum of mass taken from blocks that are still standing.
  double partial_mass_removed() const;
  /// Depth of the fully cleared prefix of rows, in meters.
  double tunnel_depth() const;

  Region zone_of(Vec2 p) const;
  /// Distance along a ray to the nearest wall or soil face, capped at the
  /// proximity range. `ray_angle` is relative to `heading`.
  double static_clearance(Vec2 p, double heading, double ray_angle) const;
  /// Distance along the unit direction `dir` to a wall or soil, up to `max`.
  double cast_static(Vec2 p, Vec2 dir, double max) const;
  /// Distance from p to the nearest wall or soil cell; negative outside free space.
  double static_distance(Vec2 p) const;
  bool disc_free(Vec2 center, double radius) const;
  /// Distance from p to the cell rectangle of b.
  double distance_to_block(Vec2 p, BlockId b) const;

  double face_x() const { return face_x_; }
  double end_x() const { return face_x_ + rows_ * block_; }
  double corridor_half_width() const { return corridor_half_; }
  double zone_back_x() const { return zone_back_; }
  double zone_half_width() const { return zone_half_; }
  double column_center_y(int col) const { return -corridor_half_ + (col + 0.5) * block_; }
  double row_x0(int row) const { return face_x_ + row * block_; }
  double block_mass() const { return block_mass_; }

  /// One line per row, nearest row first: '#' intact, '+' partly dug, '.' empty.
  std::string raster() const;

 private:
  std::size_t index(BlockId b) const { return static_cast<std::size_t>(b.row * cols_ + b.col); }
  bool inside_free_region(Vec2 p) const;
  void rebuild_frontier();

  int rows_;
  int cols_;
  double block_;
  double block_mass_;
  double face_x_;
  double corridor_half_;
  double zone_back_;
  double zone_half_;
  double proximity_range_;
  std::vector<double> remaining_;
  std::vector<BlockId> frontier_;
  int blocks_excavated_ = 0;
  double mass_removed_ = 0.0;

  struct Segment {
    Vec2 a, b;
  };
  std::vector<Segment> walls_;
};

}  // namespace tunnelswarm
