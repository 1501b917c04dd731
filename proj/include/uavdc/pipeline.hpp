#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "uavdc/clustering.hpp"
#include "uavdc/config.hpp"
#include "uavdc/graph.hpp"
#include "uavdc/rollout.hpp"
#include "uavdc/scenario.hpp"
#include "uavdc/solver.hpp"

namespace uavdc {

struct PipelineOptions {
  ClusteringAlgorithm clustering = ClusteringAlgorithm::algo1;
  bool literal = false;  // algo1 restarted from a random layout at every k
  bool shift = true;
  std::uint64_t cluster_seed = 1;
  bool route = true;     // false stops after clustering
  HoverPolicy hover;
  SolverConfig solver;
  bool stagger = false;
};

struct PipelineResult {
  std::string fingerprint;
  Clustering clustering;
  std::optional<MissionGraph> graph;
  MissionPlan plan;
  RolloutResult rollout;
  std::optional<StaggerResult> stagger;
  std::vector<PlanViolation> plan_violations;
};

Clustering cluster_field(const SensorField& field, const MissionConfig& cfg, const PipelineOptions& opt);

/// cluster -> shift -> graph -> solve -> stagger -> rollout. Errors carry the
/// failing stage in their message and keep their type.
PipelineResult run_pipeline(const MissionConfig& cfg, const SensorField& field, const PipelineOptions& opt);

/// Deterministic summary; holds no timing.
nlohmann::json pipeline_metrics_json(const PipelineResult& r, const PipelineOptions& opt);

/// Writes config.json, clustering.json, plan.json, trace.csv and metrics.json
/// into `dir`, each tagged with the config fingerprint.
void write_artifacts(const PipelineResult& r, const PipelineOptions& opt, const MissionConfig& cfg,
                     const std::string& dir);

nlohmann::json options_to_json(const PipelineOptions& opt);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace uavdc
