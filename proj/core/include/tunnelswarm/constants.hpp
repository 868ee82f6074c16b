#pragma once

#include <string_view>

namespace tunnelswarm {

// Fixed model coefficients of the power and degradation model.
inline constexpr double kSensingBaseRate = 1.67e-4;      // P_0 / s
inline constexpr double kWheelBaseRate = 2.2e-3;         // P_0 / s per wheel
inline constexpr double kExcavationBaseRate = 0.02;      // P_0 / s
inline constexpr double kNoiseFraction = 0.1;            // sigma relative to core value
inline constexpr double kSensingRangeFloor = 0.5;        // m
inline constexpr double kSigmoidSlope = 10.0;
inline constexpr double kSensingDecay = 2.0;
inline constexpr double kSensingLossMax = 2.0;
inline constexpr double kPowerDecay = 5.0;

/// Every tunable constant of the simulated world. Units: metres, seconds,
/// masses in units of robot mass, energy in units of battery capacity.
struct SimConstants {
  double robot_mass = 1.0;
  double battery_capacity = 1.0;
  double v_max = 0.22;
  double d_max = 2.5;
  double excavation_rate_max = 0.2;
  double tick_rate = 100.0;
  double sim_duration = 900.0;
  double recharge_rate = 0.10;
  double charge_cutoff = 0.30;
  double maintenance_duration = 5.0;
  double corridor_width = 0.8;
  double excavation_zone_offset = 1.5;
  double chain_link_range = 2.0;
  double spacing_distance = 1.0;
  double avoid_distance = 0.5;
  double radio_range = 50.0;
  double block_size = 0.2;
  double wheel_base = 0.16;
  double robot_radius = 0.10;
  double velocity_midpoint = 2.5;
  double excavation_midpoint = 1.5;
  double threshold_multiplier = 1.5;

  // World extent and sensor limits.
  double zone_length = 2.0;
  double zone_width = 2.0;
  int soil_rows = 40;
  double proximity_range = 1.0;

  /// Throws ValidationError naming the `constants.<field>` key.
  void validate() const;

  double dt() const { return 1.0 / tick_rate; }
  long ticks_per_second() const;
  long total_ticks() const;
  int soil_columns() const;
};

bool operator==(const SimConstants& a, const SimConstants& b);

}  // namespace tunnelswarm
