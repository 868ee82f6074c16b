#include <benchmark/benchmark.h>

#include "tunnelswarm/engine.hpp"
#include "tunnelswarm/kinematics.hpp"
#include "tunnelswarm/pfddr.hpp"
#include "tunnelswarm/rng.hpp"

using namespace tunnelswarm;

static void BM_SimulationTick(benchmark::State& state) {
  ScenarioSpec spec = *named_preset("combo-pfddr-on")->begin();
  spec.constants.sim_duration = 1e6;
  Simulation sim(spec, 0);
  for (auto _ : state) sim.tick();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulationTick);

static void BM_Replicate60s(benchmark::State& state) {
  ScenarioSpec spec = *named_preset("combo-pfddr-on")->begin();
  spec.constants.sim_duration = 60.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replicate(spec, 0));
}
BENCHMARK(BM_Replicate60s)->Unit(benchmark::kMillisecond);

static void BM_ProximityScan(benchmark::State& state) {
  const World world;
  std::vector<Pose> poses;
  for (int i = 0; i < 5; ++i) poses.push_back(initial_pose(i, 5));
  for (auto _ : state) benchmark::DoNotOptimize(proximity_scan(2, poses, world, 0.1, 1.0));
}
BENCHMARK(BM_ProximityScan);

static void BM_Median50(benchmark::State& state) {
  RandomStream r(1);
  std::vector<double> v(50);
  for (auto& x : v) x = r.normal();
  for (auto _ : state) benchmark::DoNotOptimize(median(v));
}
BENCHMARK(BM_Median50);
BENCHMARK_MAIN();
