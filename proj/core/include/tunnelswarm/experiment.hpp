#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tunnelswarm/engine.hpp"
#include "tunnelswarm/scenario.hpp"

namespace tunnelswarm {

inline constexpr const char* kResultsHeader =
    "scenario_id,replicate,seed,pfddr,n_faulty,fault_types,blocks_excavated,power_consumed_pct,"
    "robots_depleted,tunnel_depth_m";
inline constexpr const char* kDetectionsHeader =
    "scenario_id,replicate,t_s,robot_id,category,dc_at_detection";

/// Artifact version written into every manifest.
std::string_view library_version();

struct ResultRow {
  std::string scenario_id;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool pfddr = false;
  int n_faulty = 0;
  std::string fault_types;
  int blocks_excavated = 0;
  double power_consumed_pct = 0.0;
  int robots_depleted = 0;
  double tunnel_depth_m = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct DetectionRow {
  std::string scenario_id;
  int replicate = 0;
  double t_s = 0.0;
  int robot_id = 0;
  std::string category;
  double dc_at_detection = 0.0;

  friend bool operator==(const DetectionRow&, const DetectionRow&) = default;
};

/// One finished replicate with everything needed by the writers and by
/// acceptance checks that look past the CSV columns.
struct ReplicateOutcome {
  std::size_t spec_index = 0;
  int replicate = 0;
  RunMetrics metrics;
};

struct BatchOptions {
  /// Worker threads; values below 1 mean 1.
  int parallel = 1;
  bool check_invariants = false;
  /// When set, a per-replicate trace CSV is written into this directory.
  std::filesystem::path trace_dir;
  int trace_every = 10;
};

struct BatchResult {
  std::vector<ScenarioSpec> specs;
  /// Sorted by (spec index, replicate) regardless of completion order.
  std::vector<ReplicateOutcome> outcomes;
};

/// Runs spec.replicates replicates of every spec on a worker pool.
BatchResult run_batch(const std::vector<ScenarioSpec>& specs, const BatchOptions& options = {});

std::vector<ResultRow> result_rows(const BatchResult& batch);
std::vector<DetectionRow> detection_rows(const BatchResult& batch);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_detections_csv(std::ostream& out, const std::vector<DetectionRow>& rows);

/// Columns are located by header name, so extra or reordered columns are
/// fine. Throws CsvSchemaError when a required column is absent or a cell
/// does not parse.
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<DetectionRow> read_detections_csv(std::istream& in);

/// JSON document with the resolved specs, seeds, replicate counts, the
/// invoking command and the library version.
std::string manifest_json(const BatchResult& batch, const std::vector<std::string>& command);

/// Writes results.csv, detections.csv, manifest.json and scenarios/<id>.toml
/// into `dir`, creating it if needed. Throws IoError.
void write_output_dir(const std::filesystem::path& dir, const BatchResult& batch,
                      const std::vector<std::string>& command);

}  // namespace tunnelswarm
