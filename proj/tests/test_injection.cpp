#include <gtest/gtest.h>

#include <cmath>

#include "tunnelswarm/injection.hpp"

using namespace tunnelswarm;

namespace {

ScenarioSpec one_robot(FaultCategory cat, double rate) {
  ScenarioSpec s;
  s.scenario_id = "inj";
  s.n_robots = 1;
  s.fault_plan = {{{{cat, rate, 0.01}}}};
  return s;
}

// Runs `seconds` of injection for a single robot and returns its state.
DegradationState run(const ScenarioSpec& spec, int seconds, std::uint64_t seed) {
  RandomStream plan_rng(seed);
  const InjectionPlan plan = InjectionPlan::resolve(spec, plan_rng);
  std::vector<DegradationState> states(1);
  std::vector<RandomStream> rngs{RandomStream(seed + 1)};
  for (int s = 0; s < seconds; ++s) inject_second(plan, states, {true}, rngs);
  return states[0];
}

}  // namespace

TEST(Injection, ZeroRateNeverFires) {
  EXPECT_EQ(run(one_robot(FaultCategory::Excavation, 0.0), 900, 1), DegradationState{});
}

TEST(Injection, CertainRateIsDeterministic) {
  const auto s = run(one_robot(FaultCategory::Excavation, 1.0), 900, 1);
  EXPECT_NEAR(s.dc_E, 9.0, 1e-9);
  EXPECT_EQ(s.dc_s, 0.0);
}

TEST(Injection, CountMatchesBinomialWithinThreeSigma) {
  constexpr int seconds = 10000;
  constexpr double p = 0.15;
  const auto s = run(one_robot(FaultCategory::Sensing, p), seconds, 5);
  const double count = std::round(s.dc_s / 0.01);
  const double mean = seconds * p;
  const double sigma = std::sqrt(seconds * p * (1.0 - p));
  EXPECT_LE(std::abs(count - mean), 3.0 * sigma) << count;
}

TEST(Injection, FinalDcDistributionOverReplicates) {
  // Binomial(900, 0.15) x 0.01: mean 1.35, sd 0.1071.
  constexpr int reps = 400;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double dc = run(one_robot(FaultCategory::Sensing, 0.15), 900, 1000 + 7 * r).dc_s;
    sum += dc;
    sq += dc * dc;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sq / reps - mean * mean);
  const double sd_expected = 0.01 * std::sqrt(900 * 0.15 * 0.85);
  EXPECT_NEAR(sd_expected, 0.107, 5e-4);
  EXPECT_NEAR(mean, 1.35, 3.0 * sd_expected / std::sqrt(reps));
  EXPECT_NEAR(sd, sd_expected, 0.015);
}

TEST(Injection, MotorChannelsShareOneDraw) {
  ScenarioSpec s;
  s.scenario_id = "m";
  s.n_robots = 1;
  s.fault_plan = {{{{FaultCategory::MotorLeft, 0.3, 0.01}, {FaultCategory::MotorRight, 0.3, 0.01}}}};
  RandomStream rng(3);
  const auto plan = InjectionPlan::resolve(s, rng);
  ASSERT_EQ(plan.robots[0].size(), 1u);
  EXPECT_TRUE(plan.robots[0][0].left);
  EXPECT_TRUE(plan.robots[0][0].right);
  const auto st = run(s, 500, 9);
  EXPECT_EQ(st.dc_l, st.dc_r);
  EXPECT_GT(st.dc_l, 0.0);
}

TEST(Injection, CombinationRatesInRange) {
  ScenarioSpec s = preset({PresetKind::Combination, SweepFault::Sensing, false})[0];
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed);
    const auto plan = InjectionPlan::resolve(s, rng);
    ASSERT_EQ(plan.robots.size(), 5u);
    for (const auto& robot : plan.robots) {
      ASSERT_EQ(robot.size(), 3u);
      for (const auto& c : robot) {
        EXPECT_GE(c.rate, 0.01);
        EXPECT_LT(c.rate, 0.15);
      }
    }
  }
}

TEST(Injection, IneligibleRobotsSkippedWithoutDraws) {
  const ScenarioSpec spec = one_robot(FaultCategory::Sensing, 0.5);
  RandomStream plan_rng(1);
  const auto plan = InjectionPlan::resolve(spec, plan_rng);
  std::vector<DegradationState> a(1), b(1);
  std::vector<RandomStream> ra{RandomStream(4)}, rb{RandomStream(4)};
  for (int s = 0; s < 100; ++s) {
    inject_second(plan, a, {s % 3 != 0}, ra);
    if (s % 3 != 0) inject_second(plan, b, {true}, rb);
  }
  EXPECT_EQ(a[0], b[0]);
}

TEST(Injection, TrajectoriesNonDecreasingAndReproducible) {
  const ScenarioSpec spec = one_robot(FaultCategory::Excavation, 0.15);
  RandomStream plan_rng(1);
  const auto plan = InjectionPlan::resolve(spec, plan_rng);
  std::vector<DegradationState> a(1), b(1);
  std::vector<RandomStream> ra{RandomStream(8)}, rb{RandomStream(8)};
  double prev = 0.0;
  for (int s = 0; s < 900; ++s) {
    inject_second(plan, a, {true}, ra);
    inject_second(plan, b, {true}, rb);
    ASSERT_GE(a[0].dc_E, prev);
    ASSERT_EQ(a[0], b[0]);
    prev = a[0].dc_E;
  }
}
