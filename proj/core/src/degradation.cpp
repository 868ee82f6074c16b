#include "tunnelswarm/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tunnelswarm {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double effective_dc(double dc, double standard_normal_draw) {
  return std::max(0.0, dc + standard_normal_draw * kNoiseFraction * dc);
}

double sensing_range(double dc_eff, const SimConstants& c) {
  const double loss = kSensingLossMax - kSensingLossMax * std::exp(-kSensingDecay * dc_eff);
  return std::clamp(c.d_max - loss, kSensingRangeFloor, c.d_max);
}

double wheel_velocity_factor(double dc_eff, double load_ratio, const SimConstants& c) {
  // Grouped so that load enters as an exact additive shift of dc.
  const double shifted = dc_eff + (load_ratio - 1.0);
  return 1.0 - logistic(kSigmoidSlope * (shifted + (1.0 - c.velocity_midpoint)));
}

double excavation_factor(double dc_eff, const SimConstants& c) {
  return 1.0 - logistic(kSigmoidSlope * (dc_eff - c.excavation_midpoint));
}

double excavation_rate(double dc_eff, const SimConstants& c) {
  return c.excavation_rate_max * excavation_factor(dc_eff, c);
}

double power_multiplier(double dc) { return 2.0 - std::exp(-kPowerDecay * dc); }

PowerRates power_rates(const DegradationState& state, const LoadState& load,
                       std::array<bool, 2> wheel_active, bool excavating,
                       const std::array<double, 4>& noise, const SimConstants& c) {
  const double p0 = c.battery_capacity;
  const double ratio = load.load_ratio(c.robot_mass);
  auto wheel = [&](double dc, double draw) {
    const double core = ratio * power_multiplier(dc) * kWheelBaseRate * p0;
    return std::max(0.0, core + draw * kNoiseFraction * kWheelBaseRate * p0);
  };

  PowerRates r;
  r.sensing = std::max(0.0, kSensingBaseRate * p0 + noise[0] * kNoiseFraction * kSensingBaseRate * p0);
  if (wheel_active[0]) r.wheel_left = wheel(state.dc_l, noise[1]);
  if (wheel_active[1]) r.wheel_right = wheel(state.dc_r, noise[2]);
  if (excavating) {
    const double base = kExcavationBaseRate * p0 + noise[3] * kNoiseFraction * kExcavationBaseRate * p0;
    r.excavation = std::max(0.0, power_multiplier(state.dc_E) * base);
  }
  return r;
}

void write_curve_csv(std::ostream& out, double lo, double hi, double step,
                     const SimConstants& c) {
  out << "dc,sensing_range,velocity_factor_unloaded,velocity_factor_loaded,"
         "excavation_factor,power_multiplier\n";
  const long n = step > 0.0 ? std::lround(std::floor((hi - lo) / step + 1e-9)) : 0;
  char buf[256];
  for (long i = 0; i <= n; ++i) {
    const double dc = lo + static_cast<double>(i) * step;
    std::snprintf(buf, sizeof buf, "%.6f,%.9f,%.9f,%.9f,%.9f,%.9f\n", dc, sensing_range(dc, c),
                  wheel_velocity_factor(dc, 1.0, c), wheel_velocity_factor(dc, 2.0, c),
                  excavation_factor(dc, c), power_multiplier(dc));
    out << buf;
  }
}

}  // namespace tunnelswarm
