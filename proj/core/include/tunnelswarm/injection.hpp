#pragma once

#include <vector>

#include "tunnelswarm/degradation.hpp"
#include "tunnelswarm/rng.hpp"
#include "tunnelswarm/scenario.hpp"

namespace tunnelswarm {

/// One Bernoulli draw per second; on success `increment` is added to every
/// targeted coefficient.
struct ResolvedChannel {
  bool sensing = false;
  bool left = false;
  bool right = false;
  bool excavation = false;
  double rate = 0.0;
  double increment = 0.01;
};

struct InjectionPlan {
  std::vector<std::vector<ResolvedChannel>> robots;

  /// Fixes per-robot rates. In combination mode each fault type gets one rate
  /// per robot drawn from `rng`; matching left and right motor channels merge
  /// into a single channel.
  static InjectionPlan resolve(const ScenarioSpec& spec, RandomStream& rng);
};

/// Applies one simulated second of degradation. Robots with `eligible[i]`
/// false are skipped without consuming draws.
void inject_second(const InjectionPlan& plan, std::vector<DegradationState>& states,
                   const std::vector<bool>& eligible, std::vector<RandomStream>& rngs);

}  // namespace tunnelswarm
