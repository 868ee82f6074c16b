#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tunnelswarm/boxplot.hpp"
#include "tunnelswarm/errors.hpp"
#include "tunnelswarm/experiment.hpp"
#include "tunnelswarm/rng.hpp"

using namespace tunnelswarm;

namespace {

std::vector<ScenarioSpec> small_batch() {
  auto specs = preset({PresetKind::IsolatedSweep, SweepFault::Sensing, true}, 11);
  specs.resize(3);
  for (auto& s : specs) {
    s.constants.sim_duration = 20.0;
    s.replicates = 2;
  }
  return specs;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TEST(Csv, ResultsRoundTrip) {
  const std::vector<ResultRow> rows{
      {"combo", 0, 18446744073709551615ull, true, 5, "sensing;motor_left", 218, 1483.26, 0, 1.6},
      {"weird, \"quoted\"", 3, 42, false, 0, "", 0, 0.1, 2, 0.0}};
  std::stringstream ss;
  write_results_csv(ss, rows);
  EXPECT_EQ(ss.str().rfind(std::string(kResultsHeader) + "\n", 0), 0u);
  EXPECT_EQ(read_results_csv(ss), rows);
}

TEST(Csv, DetectionsRoundTrip) {
  const std::vector<DetectionRow> rows{{"combo", 1, 12.34, 2, "locomotion", 0.15},
                                       {"combo", 1, 100.0, 4, "sensing", 0.2}};
  std::stringstream ss;
  write_detections_csv(ss, rows);
  EXPECT_EQ(read_detections_csv(ss), rows);
}

TEST(Csv, ReorderedColumnsAccepted) {
  std::stringstream ss("dc_at_detection,category,robot_id,t_s,replicate,scenario_id\n0.5,sensing,1,2.5,0,x\n");
  const auto rows = read_detections_csv(ss);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].scenario_id, "x");
  EXPECT_EQ(rows[0].dc_at_detection, 0.5);
}

TEST(Csv, MissingColumnRejected) {
  std::stringstream ss("scenario_id,replicate,seed\nx,0,1\n");
  try {
    read_results_csv(ss);
    FAIL();
  } catch (const CsvSchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("missing column"), std::string::npos) << e.what();
  }
}

TEST(Csv, BadCellRejected) {
  std::stringstream ss(std::string(kDetectionsHeader) + "\nx,zero,1,2,sensing,0.1\n");
  EXPECT_THROW(read_detections_csv(ss), CsvSchemaError);
}

TEST(Batch, OrderIndependentOfParallelism) {
  const auto specs = small_batch();
  BatchOptions serial, threaded;
  threaded.parallel = 3;
  const auto a = run_batch(specs, serial);
  const auto b = run_batch(specs, threaded);
  ASSERT_EQ(a.outcomes.size(), 6u);
  EXPECT_EQ(result_rows(a), result_rows(b));
  EXPECT_EQ(detection_rows(a), detection_rows(b));
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(a.outcomes[i].spec_index, i / 2);
    EXPECT_EQ(a.outcomes[i].replicate, static_cast<int>(i % 2));
  }
}

TEST(Batch, ManifestDescribesRun) {
  const auto batch = run_batch(small_batch());
  const auto j = nlohmann::json::parse(manifest_json(batch, {"swarm-sim", "run", "--preset", "x"}));
  EXPECT_EQ(j.at("version").get<std::string>(), std::string(library_version()));
  EXPECT_EQ(j.at("command").size(), 4u);
  ASSERT_EQ(j.at("scenarios").size(), 3u);
  EXPECT_EQ(j.at("scenarios")[0].at("seed").get<std::uint64_t>(), 11u);
  EXPECT_EQ(j.at("scenarios")[2].at("n_faulty").get<int>(), 2);
}

TEST(Batch, WritesOutputDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "tunnelswarm_test_outdir";
  std::filesystem::remove_all(dir);
  const auto batch = run_batch(small_batch());
  write_output_dir(dir, batch, {"test"});
  for (const char* f : {"results.csv", "detections.csv", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::ifstream in(dir / "results.csv");
  std::stringstream on_disk, expected;
  on_disk << in.rdbuf();
  write_results_csv(expected, result_rows(batch));
  EXPECT_EQ(on_disk.str(), expected.str());
  for (const auto& s : batch.specs)
    EXPECT_TRUE(std::filesystem::exists(dir / "scenarios" / (s.scenario_id + ".toml")));
  std::ifstream toml(dir / "scenarios" / (batch.specs[1].scenario_id + ".toml"));
  std::stringstream text;
  text << toml.rdbuf();
  EXPECT_EQ(load_scenario(text.str()), batch.specs[1]);
  std::filesystem::remove_all(dir);
}

TEST(Batch, UnwritableDirectoryIsIoError) {
  const auto file = std::filesystem::temp_directory_path() / "tunnelswarm_test_plainfile";
  std::ofstream(file) << "x";
  EXPECT_THROW(write_output_dir(file / "sub", run_batch({}), {}), IoError);
  std::filesystem::remove(file);
}

TEST(BoxStats, MatchesType7Oracle) {
  RandomStream r(21);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(1 + static_cast<std::size_t>(r.uniform() * 40.0));
    for (auto& x : v) x = r.normal();
    const BoxStats s = box_stats(v);
    ASSERT_EQ(s.n, v.size());
    ASSERT_NEAR(s.q1, oracle_quantile(v, 0.25), 1e-12);
    ASSERT_NEAR(s.median, oracle_quantile(v, 0.5), 1e-12);
    ASSERT_NEAR(s.q3, oracle_quantile(v, 0.75), 1e-12);
    const double iqr = s.q3 - s.q1;
    ASSERT_GE(s.whisker_low, s.q1 - 1.5 * iqr - 1e-12);
    ASSERT_LE(s.whisker_high, s.q3 + 1.5 * iqr + 1e-12);
    for (double o : s.outliers) ASSERT_TRUE(o < s.whisker_low || o > s.whisker_high);
  }
}

TEST(BoxStats, KnownValues) {
  const BoxStats s = box_stats({1, 2, 3, 4, 100});
  EXPECT_EQ(s.q1, 2.0);
  EXPECT_EQ(s.median, 3.0);
  EXPECT_EQ(s.q3, 4.0);
  EXPECT_EQ(s.whisker_high, 4.0);
  EXPECT_EQ(s.outliers, std::vector<double>{100.0});
  EXPECT_THROW(box_stats({}), std::invalid_argument);
}

TEST(Svg, OneBoxPerGroupAndNoData) {
  const std::string svg =
      render_boxplot_svg({{"a", {1, 2, 3}}, {"b", {}}, {"c", {4, 5}}}, "t", "blocks");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count(svg, "class=\"box\""), 2u);
  EXPECT_EQ(count(svg, "class=\"no-data\""), 1u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, EmptyPlot) {
  for (const auto& groups : {std::vector<BoxGroup>{}, std::vector<BoxGroup>{{"a", {}}}}) {
    const std::string svg = render_boxplot_svg(groups, "t", "y");
    EXPECT_EQ(count(svg, "class=\"box\""), 0u);
    EXPECT_GE(count(svg, "no data"), 1u);
  }
}

TEST(Svg, EscapesLabels) {
  const std::string svg = render_boxplot_svg({{"a<b&c", {1}}}, "x\"y", "z");
  EXPECT_EQ(svg.find("a<b"), std::string::npos);
  EXPECT_NE(svg.find("a&lt;b&amp;c"), std::string::npos);
}
