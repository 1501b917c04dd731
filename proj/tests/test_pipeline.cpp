#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "uavdc/errors.hpp"
#include "uavdc/pipeline.hpp"
#include "uavdc/scenario.hpp"
#include "uavdc/sweep.hpp"

using namespace uavdc;

namespace {

PipelineOptions fast_options() {
  PipelineOptions opt;
  opt.solver.iterations = 150;
  opt.solver.stall_iterations = 60;
  return opt;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepSpec small_sweep() {
  SweepSpec spec;
  spec.variable = SweepVariable::battery_mah;
  spec.values = {1000, 2500};
  spec.repetitions = 2;
  spec.area = {0, 0, 2500, 2500};
  spec.dock = {1250, 1250};
  spec.sensors = 300;
  SolverConfig sc;
  sc.iterations = 100;
  sc.stall_iterations = 40;
  spec.algorithms = {parse_sweep_algorithm("algo1:tabu", sc), parse_sweep_algorithm("hca:greedy", sc)};
  spec.workers = 2;
  return spec;
}

}  // namespace

TEST_CASE("pipeline on a one-SN field flies a single out-and-back") {
  const MissionConfig cfg;
  const auto field = generate_field({0, 0, 5000, 5000}, 1, {2500, 2500}, 3);
  const auto r = run_pipeline(cfg, field, fast_options());
  CHECK(r.clustering.size() == 1);
  CHECK(r.plan.deployed() == 1);
  CHECK(r.plan.routes[0].visits == std::vector<int>{1});
  CHECK(r.rollout.metrics.visited_chs == 1);
  CHECK(r.plan_violations.empty());
  CHECK(r.rollout.violations.empty());
  CHECK(r.graph->num_heads() == 1);
}

TEST_CASE("pipeline reruns give byte-identical metrics and artifacts") {
  const MissionConfig cfg;
  const auto field = generate_field({0, 0, 3000, 3000}, 400, {1500, 1500}, 12);
  const auto opt = fast_options();
  const auto a = run_pipeline(cfg, field, opt);
  const auto b = run_pipeline(cfg, field, opt);
  CHECK(pipeline_metrics_json(a, opt).dump() == pipeline_metrics_json(b, opt).dump());
  CHECK(a.plan_violations.empty());

  const auto dir = std::filesystem::temp_directory_path() / "uavdc_pipeline_test";
  std::filesystem::remove_all(dir);
  write_artifacts(a, opt, cfg, (dir / "a").string());
  write_artifacts(b, opt, cfg, (dir / "b").string());
  for (const char* name : {"config.json", "clustering.json", "plan.json", "trace.csv", "metrics.json"}) {
    CAPTURE(name);
    const auto text = slurp(dir / "a" / name);
    CHECK_FALSE(text.empty());
    CHECK(text.find(a.fingerprint) != std::string::npos);
  }
  CHECK(slurp(dir / "a" / "metrics.json") == slurp(dir / "b" / "metrics.json"));
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("pipeline errors name the failing stage and keep their type") {
  MissionConfig cfg;
  cfg.max_members = 1;
  const auto field = generate_field({0, 0, 3000, 3000}, 50, {1500, 1500}, 1);
  PipelineOptions opt = fast_options();
  opt.solver.iterations = 0;
  try {
    run_pipeline(cfg, field, opt);
    FAIL("expected an error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("solve") != std::string::npos);
  }
}

TEST_CASE("sweep algorithm labels parse") {
  const auto a = parse_sweep_algorithm("algo1-noshift:sa:range:120");
  CHECK(a.options.clustering == ClusteringAlgorithm::algo1);
  CHECK_FALSE(a.options.shift);
  CHECK(a.options.solver.algorithm == SolverKind::sa);
  CHECK(a.options.hover.mode == HoverMode::range);
  CHECK(a.options.hover.range_m == 120.0);
  CHECK(parse_sweep_algorithm("algo1-literal").options.literal);
  CHECK(parse_sweep_algorithm("kmeans-rerun").options.clustering == ClusteringAlgorithm::kmeans_rerun);
  CHECK_THROWS_AS(parse_sweep_algorithm("dbscan"), InvalidInput);
}

TEST_CASE("sweep spec validation") {
  SweepSpec s = small_sweep();
  s.values = {2500, 1000};
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = small_sweep();
  s.repetitions = 0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = small_sweep();
  s.values.clear();
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("sweeps are deterministic and plots come from the CSV alone") {
  const auto spec = small_sweep();
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2 * 2 * 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].error.empty());
    CHECK(rows[i].value == spec.values[i / 4]);
    CHECK(rows[i].seed == 1 + (i / 2) % 2);
    CHECK(rows[i].algorithm == spec.algorithms[i % 2].label);
  }
  auto one_worker = spec;
  one_worker.workers = 1;
  std::ostringstream a, b;
  write_rows_csv(a, rows, spec.variable, "fp");
  write_rows_csv(b, run_sweep(one_worker), spec.variable, "fp");
  CHECK(a.str() == b.str());

  const auto agg = aggregate(rows);
  REQUIRE(agg.size() == 4);
  std::ostringstream csv;
  write_aggregate_csv(csv, agg, spec.variable, "fp");
  std::istringstream in(csv.str());
  std::string column;
  const auto back = read_aggregate_csv(in, &column);
  CHECK(column == "battery_mah");
  for (auto m : {PlotMetric::energy, PlotMetric::visited, PlotMetric::deployed, PlotMetric::clusters}) {
    const auto svg = render_svg(back, m, column);
    CHECK(svg == render_svg(back, m, column));
    CHECK(svg.rfind("<svg", 0) == 0);
  }
  // Re-serializing the parsed aggregate reproduces the file.
  std::ostringstream again;
  write_aggregate_csv(again, back, spec.variable, "fp");
  CHECK(again.str() == csv.str());
}

TEST_CASE("aggregate statistics") {
  std::vector<SweepRow> rows;
  for (int i = 0; i < 3; ++i) {
    SweepRow r;
    r.value = 1;
    r.seed = static_cast<std::uint64_t>(i + 1);
    r.algorithm = "x";
    r.clusters = 10 + 2 * i;  // 10, 12, 14
    r.total_energy_kj = 100.0 * (i + 1);
    rows.push_back(r);
  }
  SweepRow bad = rows[0];
  bad.error = "infeasible: test";
  bad.clusters = 1000;
  rows.push_back(bad);
  const auto agg = aggregate(rows);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].samples == 3);
  CHECK(agg[0].errors == 1);
  CHECK(agg[0].clusters_mean == doctest::Approx(12.0));
  CHECK(agg[0].clusters_std == doctest::Approx(2.0));
  CHECK(agg[0].energy_mean == doctest::Approx(200.0));
  CHECK(agg[0].energy_std == doctest::Approx(100.0));
}
