// swarm-sim: run presets or scenario files, sweep fault counts, plot results
// and dump the degradation curves.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tunnelswarm/boxplot.hpp"
#include "tunnelswarm/degradation.hpp"
#include "tunnelswarm/errors.hpp"
#include "tunnelswarm/experiment.hpp"
#include "tunnelswarm/scenario.hpp"

namespace fs = std::filesystem;
using namespace tunnelswarm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_summary(const BatchResult& batch) {
  struct Agg {
    int runs = 0;
    long blocks = 0;
    double power = 0.0;
    int depleted = 0;
    std::size_t detections = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Agg> agg;
  for (const auto& o : batch.outcomes) {
    const auto& id = batch.specs[o.spec_index].scenario_id;
    if (!agg.count(id)) order.push_back(id);
    auto& a = agg[id];
    ++a.runs;
    a.blocks += o.metrics.blocks_excavated;
    a.power += o.metrics.power_consumed_pct;
    a.depleted += o.metrics.robots_depleted;
    a.detections += o.metrics.detections.size();
  }
  std::printf("%-32s %5s %8s %12s %9s %10s\n", "scenario", "runs", "blocks", "power_pct",
              "depleted", "detections");
  for (const auto& id : order) {
    const auto& a = agg[id];
    std::printf("%-32s %5d %8ld %12.1f %9d %10zu\n", id.c_str(), a.runs, a.blocks, a.power,
                a.depleted, a.detections);
  }
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::string out = "out";
  int parallel = 1;
  bool trace = false;
  int trace_every = 10;
  bool check = false;
};

int execute(std::vector<ScenarioSpec> specs, const RunArgs& a, const std::vector<std::string>& argv) {
  for (auto& s : specs) {
    if (a.replicates) s.replicates = *a.replicates;
    s.validate();
  }
  BatchOptions opts;
  opts.parallel = a.parallel;
  opts.check_invariants = a.check;
  if (a.trace) {
    opts.trace_dir = fs::path(a.out) / "traces";
    opts.trace_every = a.trace_every;
  }
  const BatchResult batch = run_batch(specs, opts);
  write_output_dir(a.out, batch, argv);
  print_summary(batch);
  if (a.check) {
    for (const auto& o : batch.outcomes) {
      if (o.metrics.invariant_failures > 0) {
        std::fprintf(stderr, "invariant violated in %s replicate %d: %s\n",
                     batch.specs[o.spec_index].scenario_id.c_str(), o.replicate,
                     o.metrics.first_invariant_failure.c_str());
        return 1;
      }
    }
  }
  return 0;
}

std::vector<ScenarioSpec> specs_for_run(const RunArgs& a) {
  if (!a.config.empty()) {
    ScenarioSpec spec = load_scenario(read_text(a.config));
    if (a.seed) spec.seed = *a.seed;
    return {spec};
  }
  auto specs = named_preset(a.preset, a.seed.value_or(1));
  if (!specs) throw ConfigError("unknown preset '" + a.preset + "'");
  return *specs;
}

fs::path input_file(const std::string& in, const char* name) {
  const fs::path p(in);
  if (fs::is_directory(p)) return p / name;
  return p;
}

int plot(const std::vector<std::string>& inputs, const std::string& kind, const std::string& out,
         const std::string& title_arg) {
  std::vector<BoxGroup> groups;
  std::string y_label;
  if (kind == "blocks" || kind == "power") {
    std::map<std::string, std::size_t> index;
    for (const auto& in : inputs) {
      const fs::path p = input_file(in, "results.csv");
      std::ifstream f(p, std::ios::binary);
      if (!f) throw IoError("cannot read " + p.string());
      for (const auto& r : read_results_csv(f)) {
        auto [it, fresh] = index.try_emplace(r.scenario_id, groups.size());
        if (fresh) groups.push_back({r.scenario_id, {}});
        groups[it->second].values.push_back(kind == "blocks" ? r.blocks_excavated
                                                             : r.power_consumed_pct);
      }
    }
    y_label = kind == "blocks" ? "blocks excavated" : "power consumed (% of one battery)";
  } else {
    groups = {{"sensing", {}}, {"motor", {}}, {"excavation", {}}};
    for (const auto& in : inputs) {
      const fs::path p = input_file(in, "detections.csv");
      std::ifstream f(p, std::ios::binary);
      if (!f) throw IoError("cannot read " + p.string());
      for (const auto& r : read_detections_csv(f)) {
        for (auto& g : groups) {
          if (g.label == r.category) g.values.push_back(r.dc_at_detection);
        }
      }
    }
    y_label = "degradation coefficient at detection";
  }
  const std::string title = title_arg.empty() ? kind : title_arg;
  const std::string svg = render_boxplot_svg(groups, title, y_label);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot open " + out + " for writing");
  f << svg;
  if (!f.flush()) throw IoError("write failed for " + out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunnel-excavating swarm simulator with predictive fault detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));
  const std::vector<std::string> command(argv, argv + argc);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a preset or a scenario file across replicates");
  auto* cfg = run->add_option("--config", run_args.config, "Scenario TOML file");
  auto* pre = run->add_option("--preset", run_args.preset,
                              "ideal | ideal-pfddr-on | combo-pfddr-on | combo-pfddr-off | "
                              "sweep-<sensing|motor|excavation>-pfddr-<on|off>");
  cfg->excludes(pre);
  pre->excludes(cfg);
  run->add_option("--seed", run_args.seed, "Base seed");
  run->add_option("--replicates", run_args.replicates, "Replicates per scenario")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("--parallel", run_args.parallel, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--trace", run_args.trace, "Write per-replicate traces to <out>/traces");
  run->add_option("--trace-every", run_args.trace_every, "Ticks between trace rows")
      ->check(CLI::PositiveNumber);
  run->add_flag("--check-invariants", run_args.check, "Assert engine invariants every tick");

  RunArgs sweep_args;
  std::string fault;
  std::string pfddr = "off";
  auto* sweep = app.add_subcommand("sweep", "Run the 0..5 faulty-robot sweep for one fault type");
  sweep->add_option("--fault", fault, "sensing | motor | excavation")
      ->required()
      ->check(CLI::IsMember({"sensing", "motor", "excavation"}));
  sweep->add_option("--pfddr", pfddr, "on | off")->check(CLI::IsMember({"on", "off"}));
  sweep->add_option("--seed", sweep_args.seed, "Base seed");
  sweep->add_option("--replicates", sweep_args.replicates, "Replicates per point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_args.out, "Output directory")->capture_default_str();
  sweep->add_option("--parallel", sweep_args.parallel, "Worker threads")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--check-invariants", sweep_args.check, "Assert engine invariants every tick");

  std::vector<std::string> plot_in;
  std::string plot_kind;
  std::string plot_out = "plot.svg";
  std::string plot_title;
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG box plots from run outputs");
  plot_cmd->add_option("--in", plot_in, "Run directories or CSV files")->required();
  plot_cmd->add_option("--kind", plot_kind, "blocks | power | dc-at-detection")
      ->required()
      ->check(CLI::IsMember({"blocks", "power", "dc-at-detection"}));
  plot_cmd->add_option("--out", plot_out, "SVG file")->capture_default_str();
  plot_cmd->add_option("--title", plot_title, "Plot title");

  std::string curves_out;
  double dc_max = 3.0;
  double dc_step = 0.01;
  auto* curves = app.add_subcommand("curves", "Write the degradation curve table as CSV");
  curves->add_option("--out", curves_out, "CSV file (stdout when omitted)");
  curves->add_option("--dc-max", dc_max, "Largest coefficient")->check(CLI::PositiveNumber);
  curves->add_option("--step", dc_step, "Grid step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      if (run_args.config.empty() && run_args.preset.empty()) {
        throw ConfigError("one of --config or --preset is required");
      }
      return execute(specs_for_run(run_args), run_args, command);
    }
    if (*sweep) {
      const std::string name = "sweep-" + fault + "-pfddr-" + pfddr;
      auto specs = named_preset(name, sweep_args.seed.value_or(1));
      if (!specs) throw ConfigError("unknown sweep '" + name + "'");
      return execute(*specs, sweep_args, command);
    }
    if (*plot_cmd) return plot(plot_in, plot_kind, plot_out, plot_title);
    if (*curves) {
      if (curves_out.empty()) {
        write_curve_csv(std::cout, 0.0, dc_max, dc_step);
        return std::cout.flush() ? 0 : kExitIo;
      }
      std::ofstream f(curves_out, std::ios::binary);
      if (!f) throw IoError("cannot open " + curves_out + " for writing");
      write_curve_csv(f, 0.0, dc_max, dc_step);
      if (!f.flush()) throw IoError("write failed for " + curves_out);
      return 0;
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const CsvSchemaError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  }
  return 0;
}
