#include "tunnelswarm/injection.hpp"

#include <array>
#include <optional>

namespace tunnelswarm {
namespace {

enum Kind { kSensing, kMotor, kExcavation };

Kind kind_of(FaultCategory c) {
  switch (c) {
    case FaultCategory::Sensing: return kSensing;
    case FaultCategory::MotorLeft:
    case FaultCategory::MotorRight: return kMotor;
    case FaultCategory::Excavation: return kExcavation;
  }
  return kSensing;
}

}  // namespace

InjectionPlan InjectionPlan::resolve(const ScenarioSpec& spec, RandomStream& rng) {
  InjectionPlan plan;
  plan.robots.resize(static_cast<std::size_t>(spec.n_robots));
  for (std::size_t i = 0; i < plan.robots.size(); ++i) {
    if (i >= spec.fault_plan.size()) continue;
    const auto& channels = spec.fault_plan[i].channels;

    std::array<std::optional<double>, 3> drawn;
    if (spec.combination_mode) {
      std::array<bool, 3> present{};
      for (const auto& c : channels) present[kind_of(c.category)] = true;
      for (std::size_t k = 0; k < 3; ++k) {
        if (present[k]) drawn[k] = rng.uniform(spec.combination_rate_min, spec.combination_rate_max);
      }
    }

    auto& out = plan.robots[i];
    std::optional<std::size_t> pending_motor;
    for (const auto& c : channels) {
      ResolvedChannel r;
      const Kind k = kind_of(c.category);
      r.rate = drawn[k] ? *drawn[k] : c.increment_probability;
      r.increment = c.increment_size;
      switch (c.category) {
        case FaultCategory::Sensing: r.sensing = true; break;
        case FaultCategory::MotorLeft: r.left = true; break;
        case FaultCategory::MotorRight: r.right = true; break;
        case FaultCategory::Excavation: r.excavation = true; break;
      }
      if (k == kMotor && pending_motor) {
        ResolvedChannel& m = out[*pending_motor];
        const bool complementary = (m.left && r.right && !m.right) || (m.right && r.left && !m.left);
        if (complementary && m.rate == r.rate && m.increment == r.increment) {
          m.left = m.left || r.left;
          m.right = m.right || r.right;
          pending_motor.reset();
          continue;
        }
      }
      out.push_back(r);
      if (k == kMotor) pending_motor = out.size() - 1;
    }
  }
  return plan;
}

void inject_second(const InjectionPlan& plan, std::vector<DegradationState>& states,
                   const std::vector<bool>& eligible, std::vector<RandomStream>& rngs) {
  for (std::size_t i = 0; i < states.size() && i < plan.robots.size(); ++i) {
    if (!eligible[i]) continue;
    for (const auto& c : plan.robots[i]) {
      if (!rngs[i].bernoulli(c.rate)) continue;
      if (c.sensing) states[i].dc_s += c.increment;
      if (c.left) states[i].dc_l += c.increment;
      if (c.right) states[i].dc_r += c.increment;
      if (c.excavation) states[i].dc_E += c.increment;
    }
  }
}

}  // namespace tunnelswarm
