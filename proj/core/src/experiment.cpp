#include "tunnelswarm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tunnelswarm/errors.hpp"

namespace tunnelswarm {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

class CsvTable {
 public:
  CsvTable(std::istream& in, const std::vector<std::string>& required) {
    std::string line;
    if (!std::getline(in, line)) throw CsvSchemaError("empty input: missing header");
    const auto header = split_csv_line(line);
    for (std::size_t i = 0; i < header.size(); ++i) index_[header[i]] = i;
    for (const auto& name : required) {
      if (!index_.count(name)) throw CsvSchemaError("missing column '" + name + "'");
    }
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      rows_.push_back(split_csv_line(line));
    }
  }

  std::size_t size() const { return rows_.size(); }

  const std::string& cell(std::size_t row, const std::string& col) const {
    const auto& r = rows_[row];
    const std::size_t i = index_.at(col);
    if (i >= r.size()) {
      throw CsvSchemaError("row " + std::to_string(row + 2) + ": missing value for '" + col + "'");
    }
    return r[i];
  }

  template <typename T>
  T number(std::size_t row, const std::string& col) const {
    const std::string& s = cell(row, col);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw CsvSchemaError("row " + std::to_string(row + 2) + ": bad value '" + s + "' for '" +
                           col + "'");
    }
    return v;
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

// Scenario ids become file names; anything outside [A-Za-z0-9._-] maps to '_'.
std::string file_stem(const std::string& id) {
  std::string out = id.empty() ? std::string("scenario") : id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

std::string trace_name(const ScenarioSpec& spec, int replicate) {
  return "trace_" + file_stem(spec.scenario_id) + "_r" + std::to_string(replicate) + ".csv";
}

}  // namespace

std::string_view library_version() { return TUNNELSWARM_VERSION; }

BatchResult run_batch(const std::vector<ScenarioSpec>& specs, const BatchOptions& options) {
  BatchResult batch;
  batch.specs = specs;
  struct Job {
    std::size_t spec;
    int replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    specs[s].validate();
    for (int r = 0; r < specs[s].replicates; ++r) jobs.push_back({s, r});
  }
  if (!options.trace_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options.trace_dir, ec);
    if (ec) throw IoError("cannot create " + options.trace_dir.string() + ": " + ec.message());
  }

  batch.outcomes.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        const Job& job = jobs[k];
        EngineOptions eo;
        eo.check_invariants = options.check_invariants;
        std::ofstream trace;
        if (!options.trace_dir.empty()) {
          const auto path = options.trace_dir / trace_name(specs[job.spec], job.replicate);
          trace.open(path, std::ios::binary);
          if (!trace) throw IoError("cannot open " + path.string() + " for writing");
          eo.trace = &trace;
          eo.trace_every = options.trace_every;
        }
        batch.outcomes[k] = {job.spec, job.replicate, run_replicate(specs[job.spec], job.replicate, eo)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(options.parallel, 1, std::max(1, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  // Jobs were enumerated in (spec, replicate) order, so outcomes already are.
  return batch;
}

std::vector<ResultRow> result_rows(const BatchResult& batch) {
  std::vector<ResultRow> rows;
  rows.reserve(batch.outcomes.size());
  for (const auto& o : batch.outcomes) {
    const ScenarioSpec& s = batch.specs[o.spec_index];
    rows.push_back({s.scenario_id, o.replicate, s.seed, s.pfddr_enabled, s.n_faulty(),
                    s.fault_types(), o.metrics.blocks_excavated, o.metrics.power_consumed_pct,
                    o.metrics.robots_depleted, o.metrics.tunnel_depth});
  }
  return rows;
}

std::vector<DetectionRow> detection_rows(const BatchResult& batch) {
  std::vector<DetectionRow> rows;
  for (const auto& o : batch.outcomes) {
    const ScenarioSpec& s = batch.specs[o.spec_index];
    for (const auto& d : o.metrics.detections) {
      rows.push_back({s.scenario_id, o.replicate, d.t, d.robot, std::string(to_string(d.category)),
                      d.dc});
    }
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.scenario_id) << ',' << r.replicate << ',' << r.seed << ','
        << (r.pfddr ? "on" : "off") << ',' << r.n_faulty << ',' << csv_field(r.fault_types) << ','
        << r.blocks_excavated << ',' << fixed6(r.power_consumed_pct) << ',' << r.robots_depleted
        << ',' << fixed6(r.tunnel_depth_m) << '\n';
  }
}

void write_detections_csv(std::ostream& out, const std::vector<DetectionRow>& rows) {
  out << kDetectionsHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.scenario_id) << ',' << r.replicate << ',' << fixed6(r.t_s) << ','
        << r.robot_id << ',' << csv_field(r.category) << ',' << fixed6(r.dc_at_detection) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  const CsvTable t(in, split_csv_line(kResultsHeader));
  std::vector<ResultRow> rows;
  rows.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    ResultRow r;
    r.scenario_id = t.cell(i, "scenario_id");
    r.replicate = t.number<int>(i, "replicate");
    r.seed = t.number<std::uint64_t>(i, "seed");
    const std::string& p = t.cell(i, "pfddr");
    if (p != "on" && p != "off") {
      throw CsvSchemaError("row " + std::to_string(i + 2) + ": bad value '" + p + "' for 'pfddr'");
    }
    r.pfddr = p == "on";
    r.n_faulty = t.number<int>(i, "n_faulty");
    r.fault_types = t.cell(i, "fault_types");
    r.blocks_excavated = t.number<int>(i, "blocks_excavated");
    r.power_consumed_pct = t.number<double>(i, "power_consumed_pct");
    r.robots_depleted = t.number<int>(i, "robots_depleted");
    r.tunnel_depth_m = t.number<double>(i, "tunnel_depth_m");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<DetectionRow> read_detections_csv(std::istream& in) {
  const CsvTable t(in, split_csv_line(kDetectionsHeader));
  std::vector<DetectionRow> rows;
  rows.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    DetectionRow r;
    r.scenario_id = t.cell(i, "scenario_id");
    r.replicate = t.number<int>(i, "replicate");
    r.t_s = t.number<double>(i, "t_s");
    r.robot_id = t.number<int>(i, "robot_id");
    r.category = t.cell(i, "category");
    r.dc_at_detection = t.number<double>(i, "dc_at_detection");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string manifest_json(const BatchResult& batch, const std::vector<std::string>& command) {
  nlohmann::ordered_json doc;
  doc["version"] = std::string(library_version());
  doc["command"] = command;
  auto& scenarios = doc["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : batch.specs) {
    nlohmann::ordered_json entry;
    entry["scenario_id"] = s.scenario_id;
    entry["seed"] = s.seed;
    entry["replicates"] = s.replicates;
    entry["pfddr"] = s.pfddr_enabled;
    entry["n_faulty"] = s.n_faulty();
    entry["fault_types"] = s.fault_types();
    entry["config_file"] = "scenarios/" + file_stem(s.scenario_id) + ".toml";
    entry["config"] = serialize_scenario(s);
    scenarios.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

void write_output_dir(const std::filesystem::path& dir, const BatchResult& batch,
                      const std::vector<std::string>& command) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "scenarios", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream results;
  write_results_csv(results, result_rows(batch));
  write_file(dir / "results.csv", results.str());

  std::ostringstream detections;
  write_detections_csv(detections, detection_rows(batch));
  write_file(dir / "detections.csv", detections.str());

  write_file(dir / "manifest.json", manifest_json(batch, command));
  for (const auto& s : batch.specs) {
    write_file(dir / "scenarios" / (file_stem(s.scenario_id) + ".toml"), serialize_scenario(s));
  }
}

}  // namespace tunnelswarm
