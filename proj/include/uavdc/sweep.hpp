#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "uavdc/pipeline.hpp"

namespace uavdc {

enum class SweepVariable { d_th, battery_mah, deadline_s };

const char* to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

/// One curve of a sweep, written `<clustering>[:<solver>[:<hover>]]`, e.g.
/// "algo1:tabu", "algo1-noshift:tabu", "algo1:tabu:range:150", "hca".
/// Clustering names: algo1, algo1-literal, kmeans-rerun, hca, each with an
/// optional "-noshift" suffix.
struct SweepAlgorithm {
  std::string label;
  PipelineOptions options;
};

SweepAlgorithm parse_sweep_algorithm(const std::string& s, const SolverConfig& base = {});

struct SweepSpec {
  SweepVariable variable = SweepVariable::battery_mah;
  std::vector<double> values;
  int repetitions = 20;
  std::uint64_t first_seed = 1;
  MissionConfig base;
  std::vector<SweepAlgorithm> algorithms;
  Rect area{0.0, 0.0, 5000.0, 5000.0};
  Point dock{2500.0, 2500.0};
  int sensors = 2000;
  bool route = true;  // false records clustering results only
  int workers = 0;    // 0: hardware concurrency

  void validate() const;
};

/// Applies a sweep value to a configuration.
MissionConfig with_value(const MissionConfig& base, SweepVariable v, double value);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string algorithm;
  int clusters = 0;
  double total_energy_kj = 0.0;
  int visited_chs = 0;
  int deployed_uavs = 0;
  double runtime_s = 0.0;
  std::string error;  // empty on success, else "<kind>: <message>"
};

/// Rows ordered by (value, seed, position in `algorithms`). Cell failures
/// become rows with an error tag.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

struct AggregateRow {
  double value = 0.0;
  std::string algorithm;
  int samples = 0;
  int errors = 0;
  double clusters_mean = 0.0, clusters_std = 0.0;
  double energy_mean = 0.0, energy_std = 0.0;
  double visited_mean = 0.0, visited_std = 0.0;
  double deployed_mean = 0.0, deployed_std = 0.0;
};

/// Mean and sample standard deviation per (value, algorithm) over rows
/// without an error.
std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows);

/// Row CSV without runtimes, so reruns are byte-identical.
void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepVariable v,
                    const std::string& fingerprint);
void write_timing_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepVariable v);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows, SweepVariable v,
                         const std::string& fingerprint);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in, std::string* variable = nullptr);

enum class PlotMetric { clusters, energy, visited, deployed };

const char* to_string(PlotMetric m);
PlotMetric plot_metric_from_string(const std::string& s);

/// Line chart of one metric with +-1 std error bars, one series per algorithm.
std::string render_svg(const std::vector<AggregateRow>& rows, PlotMetric metric, const std::string& x_label);

}  // namespace uavdc
