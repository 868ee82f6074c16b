// Acceptance run: builds every scenario family, checks criteria 1-9 and
// prints one PASS/FAIL line per check. Exit status is the number of failures
// (capped at 1).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tunnelswarm/degradation.hpp"
#include "tunnelswarm/engine.hpp"
#include "tunnelswarm/experiment.hpp"
#include "tunnelswarm/injection.hpp"
#include "tunnelswarm/pfddr.hpp"
#include "tunnelswarm/rng.hpp"

using namespace tunnelswarm;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr int kReplicates = 10;

// Pinned tolerances.
constexpr double kCurveTol = 1e-9;
constexpr double kExcavationCost = 0.10;
constexpr double kExcavationCostTol = 0.01;
constexpr double kSensingDcLo = 0.10;
constexpr double kSensingDcHi = 0.25;
constexpr double kMotorEarlyDc = 0.3;
constexpr double kMotorEarlyShare = 0.8;
constexpr double kPowerRatioLo = 1.2;
constexpr double kPowerRatioHi = 3.0;
constexpr double kStrandedSpeed = 0.01;
constexpr int kStrandedReplicates = 9;
constexpr double kBinomialSigmas = 3.0;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

struct Family {
  std::vector<ScenarioSpec> specs;
  BatchResult batch;

  // Per-spec means over replicates.
  double blocks(std::size_t i) const { return per_spec(i, [](const RunMetrics& m) { return m.blocks_excavated; }); }
  double power(std::size_t i) const { return per_spec(i, [](const RunMetrics& m) { return m.power_consumed_pct; }); }
  int depleted(std::size_t i) const {
    int n = 0;
    for (const auto& o : batch.outcomes)
      if (o.spec_index == i) n += o.metrics.robots_depleted;
    return n;
  }
  std::size_t detections(std::size_t i) const {
    std::size_t n = 0;
    for (const auto& o : batch.outcomes)
      if (o.spec_index == i) n += o.metrics.detections.size();
    return n;
  }

  template <class F>
  double per_spec(std::size_t i, F f) const {
    std::vector<double> v;
    for (const auto& o : batch.outcomes)
      if (o.spec_index == i) v.push_back(static_cast<double>(f(o.metrics)));
    return mean(v);
  }
};

Family run_family(std::vector<ScenarioSpec> specs) {
  for (auto& s : specs) s.replicates = kReplicates;
  BatchOptions o;
  o.check_invariants = true;
  Family f;
  f.specs = specs;
  f.batch = run_batch(specs, o);
  return f;
}

std::uint64_t invariant_failures(const Family& f) {
  std::uint64_t n = 0;
  for (const auto& o : f.batch.outcomes) n += o.metrics.invariant_failures;
  return n;
}

void criterion1() {
  const bool pm = std::abs(power_multiplier(0.0) - 1.0) <= kCurveTol &&
                  std::abs(power_multiplier(20.0) - 2.0) <= kCurveTol &&
                  power_multiplier(5.0) < 2.0;
  report("1.power_multiplier", pm,
         "p(0)=" + fmt("%.12f", power_multiplier(0.0)) + " p(20)=" + fmt("%.12f", power_multiplier(20.0)));

  const bool sr = std::abs(sensing_range(0.0) - 2.5) <= kCurveTol &&
                  std::abs(sensing_range(50.0) - 0.5) <= kCurveTol &&
                  std::abs(sensing_range(0.5) - (0.5 + 2.0 * std::exp(-1.0))) <= kCurveTol;
  report("1.sensing_range", sr,
         "r(0)=" + fmt("%.12f", sensing_range(0.0)) + " r(50)=" + fmt("%.12f", sensing_range(50.0)));

  const double vf = wheel_velocity_factor(0.0, 1.0);
  const double ef = excavation_factor(1.5);
  const bool det = std::abs(vf - (1.0 - 1.0 / (1.0 + std::exp(15.0)))) <= kCurveTol &&
                   std::abs(ef - 0.5) <= kCurveTol &&
                   std::abs(wheel_velocity_factor(0.5, 2.0) - 0.5) <= kCurveTol &&
                   std::abs(effective_dc(0.5, -20.0)) <= kCurveTol &&
                   std::abs(effective_dc(0.5, 1.0) - 0.55) <= kCurveTol;
  report("1.deterministic_cases", det, "vel(0,unloaded)=" + fmt("%.12f", vf) + " exc(1.5)=" + fmt("%.12f", ef));

  RandomStream r(kSeed);
  double worst = 0.0, total = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double cost = 0.0;
    for (int k = 0; k < 500; ++k) {
      const std::array<double, 4> noise{r.normal(), r.normal(), r.normal(), r.normal()};
      cost += power_rates({}, {}, {false, false}, true, noise).excavation * 0.01;
    }
    worst = std::max(worst, std::abs(cost - kExcavationCost));
    total += cost;
  }
  report("1.full_load_cost", worst <= kExcavationCostTol,
         "mean=" + fmt("%.6f", total / 100.0) + " max|dev|=" + fmt("%.6f", worst));
}

void criterion2(const Family& ideal_on) {
  report("2.ideal_no_false_positives", ideal_on.detections(0) == 0 && ideal_on.depleted(0) == 0,
         std::to_string(ideal_on.detections(0)) + " detections, " + std::to_string(ideal_on.depleted(0)) +
             " depleted over " + std::to_string(kReplicates) + " replicates");
}

void criterion3(const Family& on, const Family& off) {
  report("3.depletions", on.depleted(0) == 0 && off.depleted(0) >= 1,
         "pfddr on " + std::to_string(on.depleted(0)) + ", off " + std::to_string(off.depleted(0)));
}

void criterion4(const Family& on) {
  std::map<PfddrCategory, std::vector<double>> dc;
  for (const auto& o : on.batch.outcomes)
    for (const auto& d : o.metrics.detections) dc[d.category].push_back(d.dc);
  const auto& sens = dc[PfddrCategory::Sensing];
  const auto& motor = dc[PfddrCategory::Locomotion];
  const auto& exc = dc[PfddrCategory::Excavation];

  const double sm = mean(sens);
  report("4.sensing_mean_dc", !sens.empty() && sm >= kSensingDcLo && sm <= kSensingDcHi,
         "n=" + std::to_string(sens.size()) + " mean=" + fmt("%.4f", sm));

  const auto early = std::count_if(motor.begin(), motor.end(), [](double x) { return x < kMotorEarlyDc; });
  const double share = motor.empty() ? 0.0 : static_cast<double>(early) / static_cast<double>(motor.size());
  report("4.motor_early", !motor.empty() && share >= kMotorEarlyShare,
         "n=" + std::to_string(motor.size()) + " share below 0.3=" + fmt("%.3f", share));

  const double me = exc.empty() ? 0.0 : median(exc);
  const double mm = motor.empty() ? 0.0 : median(motor);
  report("4.excavation_after_motor", !exc.empty() && !motor.empty() && me > mm,
         "median excavation=" + fmt("%.4f", me) + " motor=" + fmt("%.4f", mm));
}

std::string sweep_line(const Family& f) {
  std::string s;
  for (std::size_t i = 0; i < f.specs.size(); ++i) s += (i ? " " : "") + fmt("%.1f", f.blocks(i));
  return s;
}

bool non_increasing(const Family& f) {
  for (std::size_t i = 1; i < f.specs.size(); ++i)
    if (f.blocks(i) > f.blocks(i - 1)) return false;
  return true;
}

void criterion5(const Family& ideal, const Family& on, const Family& off,
                const std::map<std::string, Family>& sweeps) {
  const double bi = ideal.blocks(0), bon = on.blocks(0), boff = off.blocks(0);
  report("5.blocks_order", bi >= bon && bon > boff,
         "ideal " + fmt("%.1f", bi) + ", pfddr on " + fmt("%.1f", bon) + ", off " + fmt("%.1f", boff));
  report("5.motor_sweep_monotone", non_increasing(sweeps.at("motor")), sweep_line(sweeps.at("motor")));
  report("5.excavation_sweep_monotone", non_increasing(sweeps.at("excavation")),
         sweep_line(sweeps.at("excavation")));

  std::map<std::string, double> loss;
  for (const auto& [name, f] : sweeps) loss[name] = f.blocks(0) - f.blocks(f.specs.size() - 1);
  const bool smallest = loss["sensing"] < loss["motor"] && loss["sensing"] < loss["excavation"];
  report("5.sensing_smallest_degradation", smallest,
         "blocks lost at n=5: sensing " + fmt("%.1f", loss["sensing"]) + ", motor " +
             fmt("%.1f", loss["motor"]) + ", excavation " + fmt("%.1f", loss["excavation"]));
}

void criterion6(const Family& ideal, const Family& on, const Family& off) {
  const double pi = ideal.power(0), pon = on.power(0), poff = off.power(0);
  const double ratio = pon / pi;
  report("6.power", pon > poff && ratio >= kPowerRatioLo && ratio <= kPowerRatioHi,
         "ideal " + fmt("%.1f", pi) + ", pfddr on " + fmt("%.1f", pon) + ", off " + fmt("%.1f", poff) +
             ", on/ideal " + fmt("%.3f", ratio));
}

void criterion7(const Family& motor) {
  const std::size_t last = motor.specs.size() - 1;
  const auto& spec = motor.specs[last];
  std::vector<int> stranded(static_cast<std::size_t>(spec.n_robots), 0);
  for (const auto& o : motor.batch.outcomes) {
    if (o.spec_index != last) continue;
    for (std::size_t r = 0; r < o.metrics.robots.size(); ++r) {
      const auto& s = o.metrics.robots[r];
      if (s.failed || s.final_speed_fraction < kStrandedSpeed) ++stranded[r];
    }
  }
  bool ok = true;
  std::string detail;
  for (std::size_t r = 0; r < stranded.size(); ++r) {
    const bool afflicted = r < spec.fault_plan.size() && !spec.fault_plan[r].channels.empty();
    if (!afflicted) continue;
    ok = ok && stranded[r] >= kStrandedReplicates;
    detail += "robot " + std::to_string(r) + " " + std::to_string(stranded[r]) + "/" +
              std::to_string(kReplicates) + "; ";
  }
  report("7.motor_baseline", ok, detail);
}

std::string csv_bytes(const BatchResult& b) {
  std::ostringstream out;
  write_results_csv(out, result_rows(b));
  write_detections_csv(out, detection_rows(b));
  return out.str();
}

void criterion8() {
  auto specs = *named_preset("combo-pfddr-on", kSeed);
  auto more = *named_preset("sweep-sensing-pfddr-off", kSeed);
  specs.push_back(more[3]);
  for (auto& s : specs) s.replicates = 3;
  BatchOptions serial, threaded;
  threaded.parallel = 4;
  const std::string a = csv_bytes(run_batch(specs, serial));
  const std::string b = csv_bytes(run_batch(specs, serial));
  const std::string c = csv_bytes(run_batch(specs, threaded));
  report("8.determinism", a == b && a == c, std::to_string(a.size()) + " bytes compared across 3 runs");
}

void criterion9(const std::vector<const Family*>& all, const Family& on, const Family& off) {
  RandomStream r(kSeed);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> v(1 + static_cast<std::size_t>(r.uniform() * 80.0));
    for (auto& x : v) x = r.uniform() < 0.25 ? std::floor(r.uniform(0.0, 5.0)) : r.normal();
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    const double expect = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    if (median(v) != expect) ++mismatches;
  }
  report("9.median_oracle", mismatches == 0, std::to_string(mismatches) + " mismatches in 10000 arrays");

  // Increment counts for one channel per rate against Binomial(T, p).
  bool binom_ok = true;
  std::string detail;
  for (double p : {0.01, 0.05, 0.15, 0.5}) {
    constexpr int seconds = 20000;
    ScenarioSpec s;
    s.scenario_id = "binomial";
    s.n_robots = 1;
    s.fault_plan = {{{{FaultCategory::Sensing, p, 0.01}}}};
    RandomStream plan_rng(kSeed);
    const InjectionPlan plan = InjectionPlan::resolve(s, plan_rng);
    std::vector<DegradationState> st(1);
    std::vector<RandomStream> rngs{RandomStream(kSeed + 17)};
    for (int t = 0; t < seconds; ++t) inject_second(plan, st, {true}, rngs);
    const double k = std::round(st[0].dc_s / 0.01);
    const double z = (k - seconds * p) / std::sqrt(seconds * p * (1.0 - p));
    binom_ok = binom_ok && std::abs(z) <= kBinomialSigmas;
    detail += "p=" + fmt("%.2f", p) + " z=" + fmt("%.2f", z) + "; ";
  }
  report("9.injection_binomial", binom_ok, detail);

  // Non-penetration checked every tick by the engine and once more here.
  std::uint64_t bad_ticks = 0;
  for (const auto* spec : {&on.specs[0], &off.specs[0]}) {
    Simulation sim(*spec, 0);
    while (!sim.done()) {
      sim.tick();
      std::vector<Pose> poses;
      for (const auto& rb : sim.robots()) poses.push_back(rb.pose);
      if (!configuration_valid(poses, sim.world(), spec->constants.robot_radius)) ++bad_ticks;
    }
  }
  std::uint64_t engine_bad = 0;
  std::size_t runs = 0;
  for (const Family* f : all) {
    engine_bad += invariant_failures(*f);
    runs += f->batch.outcomes.size();
  }
  report("9.non_penetration", bad_ticks == 0 && engine_bad == 0,
         std::to_string(bad_ticks) + " overlapping ticks in 2 full runs; " + std::to_string(engine_bad) +
             " invariant failures across " + std::to_string(runs) + " checked runs");
}

}  // namespace

int main() {
  std::printf("acceptance: seed %llu, %d replicates per scenario\n",
              static_cast<unsigned long long>(kSeed), kReplicates);
  criterion1();

  auto ideal_specs = preset({PresetKind::Ideal}, kSeed);
  const Family ideal = run_family(ideal_specs);
  ideal_specs[0].pfddr_enabled = true;
  ideal_specs[0].scenario_id = "ideal-pfddr-on";
  const Family ideal_on = run_family(ideal_specs);
  const Family on = run_family(*named_preset("combo-pfddr-on", kSeed));
  const Family off = run_family(*named_preset("combo-pfddr-off", kSeed));

  std::map<std::string, Family> sweeps;
  for (const char* f : {"sensing", "motor", "excavation"})
    sweeps[f] = run_family(*named_preset(std::string("sweep-") + f + "-pfddr-off", kSeed));

  criterion2(ideal_on);
  criterion3(on, off);
  criterion4(on);
  criterion5(ideal, on, off, sweeps);
  criterion6(ideal, on, off);
  criterion7(sweeps.at("motor"));
  criterion8();
  std::vector<const Family*> all{&ideal, &ideal_on, &on, &off};
  for (const auto& [name, f] : sweeps) all.push_back(&f);
  criterion9(all, on, off);

  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
