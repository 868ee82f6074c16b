#include "tunnelswarm/constants.hpp"

#include <cmath>
#include <string>

#include "tunnelswarm/errors.hpp"

namespace tunnelswarm {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string("constants.") + name, "must be strictly positive");
  }
}

}  // namespace

void SimConstants::validate() const {
  require_positive(robot_mass, "robot_mass");
  require_positive(battery_capacity, "battery_capacity");
  require_positive(v_max, "v_max");
  require_positive(d_max, "d_max");
  require_positive(excavation_rate_max, "excavation_rate_max");
  require_positive(tick_rate, "tick_rate");
  require_positive(sim_duration, "sim_duration");
  require_positive(recharge_rate, "recharge_rate");
  require_positive(maintenance_duration, "maintenance_duration");
  require_positive(corridor_width, "corridor_width");
  require_positive(excavation_zone_offset, "excavation_zone_offset");
  require_positive(chain_link_range, "chain_link_range");
  require_positive(spacing_distance, "spacing_distance");
  require_positive(avoid_distance, "avoid_distance");
  require_positive(radio_range, "radio_range");
  require_positive(block_size, "block_size");
  require_positive(wheel_base, "wheel_base");
  require_positive(robot_radius, "robot_radius");
  require_positive(velocity_midpoint, "velocity_midpoint");
  require_positive(excavation_midpoint, "excavation_midpoint");
  require_positive(zone_length, "zone_length");
  require_positive(zone_width, "zone_width");
  require_positive(proximity_range, "proximity_range");

  if (!(charge_cutoff > 0.0 && charge_cutoff < 1.0)) {
    throw ValidationError("constants.charge_cutoff", "must lie in (0, 1)");
  }
  if (!(threshold_multiplier > 1.0 && threshold_multiplier < 2.0)) {
    throw ValidationError("constants.threshold_multiplier", "must lie in (1, 2)");
  }
  const double columns = corridor_width / block_size;
  if (std::abs(columns - std::round(columns)) > 1e-9 || std::round(columns) < 1.0) {
    throw ValidationError("constants.corridor_width",
                          "must be a positive integer multiple of block_size");
  }
  const double ticks = tick_rate;
  if (std::abs(ticks - std::round(ticks)) > 1e-9 || std::lround(ticks) % 10 != 0) {
    throw ValidationError("constants.tick_rate", "must be a whole multiple of 10 Hz");
  }
  if (soil_rows < 1) {
    throw ValidationError("constants.soil_rows", "must be at least 1");
  }
  if (zone_width + 1e-12 < corridor_width) {
    throw ValidationError("constants.zone_width", "must be at least corridor_width");
  }
  if (2.0 * robot_radius > block_size + 1e-12) {
    throw ValidationError("constants.robot_radius", "robot must fit in one soil column");
  }
}

long SimConstants::ticks_per_second() const { return std::lround(tick_rate); }

long SimConstants::total_ticks() const { return std::lround(sim_duration * tick_rate); }

int SimConstants::soil_columns() const {
  return static_cast<int>(std::lround(corridor_width / block_size));
}

bool operator==(const SimConstants& a, const SimConstants& b) {
  return a.robot_mass == b.robot_mass && a.battery_capacity == b.battery_capacity &&
         a.v_max == b.v_max && a.d_max == b.d_max &&
         a.excavation_rate_max == b.excavation_rate_max && a.tick_rate == b.tick_rate &&
         a.sim_duration == b.sim_duration && a.recharge_rate == b.recharge_rate &&
         a.charge_cutoff == b.charge_cutoff &&
         a.maintenance_duration == b.maintenance_duration &&
         a.corridor_width == b.corridor_width &&
         a.excavation_zone_offset == b.excavation_zone_offset &&
         a.chain_link_range == b.chain_link_range &&
         a.spacing_distance == b.spacing_distance && a.avoid_distance == b.avoid_distance &&
         a.radio_range == b.radio_range && a.block_size == b.block_size &&
         a.wheel_base == b.wheel_base && a.robot_radius == b.robot_radius &&
         a.velocity_midpoint == b.velocity_midpoint &&
         a.excavation_midpoint == b.excavation_midpoint &&
         a.threshold_multiplier == b.threshold_multiplier &&
         a.zone_length == b.zone_length && a.zone_width == b.zone_width &&
         a.soil_rows == b.soil_rows && a.proximity_range == b.proximity_range;
}

}  // namespace tunnelswarm
