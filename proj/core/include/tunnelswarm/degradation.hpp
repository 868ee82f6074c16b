#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "tunnelswarm/constants.hpp"

namespace tunnelswarm {

struct DegradationState {
  double dc_s = 0.0;
  double dc_l = 0.0;
  double dc_r = 0.0;
  double dc_E = 0.0;

  friend bool operator==(const DegradationState&, const DegradationState&) = default;
};

struct LoadState {
  double payload = 0.0;  // units of robot mass

  double load_ratio(double robot_mass) const { return (payload + robot_mass) / robot_mass; }
};

struct PowerRates {
  double sensing = 0.0;
  double wheel_left = 0.0;
  double wheel_right = 0.0;
  double excavation = 0.0;

  double locomotion() const { return wheel_left + wheel_right; }
  double total() const { return sensing + wheel_left + wheel_right + excavation; }
};

double logistic(double x);

/// dc perturbed by a zero-mean draw with sigma 10% of dc, clamped at zero.
double effective_dc(double dc, double standard_normal_draw);

double sensing_range(double dc_eff, const SimConstants& c = {});
double wheel_velocity_factor(double dc_eff, double load_ratio, const SimConstants& c = {});
/// Mass per second removed from the face.
double excavation_rate(double dc_eff, const SimConstants& c = {});
/// Fraction of the undegraded excavation rate.
double excavation_factor(double dc_eff, const SimConstants& c = {});
double power_multiplier(double dc);

/// Per-second consumption of each subsystem. `noise` holds standard normal
/// draws for sensing, left wheel, right wheel and excavation in that order.
PowerRates power_rates(const DegradationState& state, const LoadState& load,
                       std::array<bool, 2> wheel_active, bool excavating,
                       const std::array<double, 4>& noise, const SimConstants& c = {});

/// Writes the curve table for dc = lo, lo+step, ..., hi.
void write_curve_csv(std::ostream& out, double lo, double hi, double step,
                     const SimConstants& c = {});

}  // namespace tunnelswarm
