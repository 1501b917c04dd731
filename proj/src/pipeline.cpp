#include "uavdc/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(name) + ": " + e.what());
  } catch (const Infeasible& e) {
    throw Infeasible(std::string(name) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

}  // namespace

Clustering cluster_field(const SensorField& field, const MissionConfig& cfg, const PipelineOptions& opt) {
  Clustering c;
  if (opt.clustering == ClusteringAlgorithm::algo1) {
    ConstrainedKMeansOptions o;
    o.warm_start = !opt.literal;
    c = cluster_constrained_kmeans(field, cfg.comm_range_m, cfg.max_members, opt.cluster_seed, o);
  } else {
    c = run_clustering(opt.clustering, field, cfg.comm_range_m, cfg.max_members, opt.cluster_seed);
  }
  if (opt.shift) c = shift_toward_dock(c, field, field.dock, cfg.comm_range_m);
  return c;
}

PipelineResult run_pipeline(const MissionConfig& cfg, const SensorField& field, const PipelineOptions& opt) {
  stage("config", [&] {
    cfg.validate();
    field.validate();
    opt.solver.validate();
    return 0;
  });
  PipelineResult r;
  r.fingerprint = fingerprint(cfg);
  r.clustering = stage("cluster", [&] { return cluster_field(field, cfg, opt); });
  if (!opt.route) return r;
  r.graph.emplace(stage("graph", [&] { return MissionGraph(r.clustering, field.dock, cfg, opt.hover); }));
  const MissionGraph& g = *r.graph;
  const double budget = cfg.battery.mission_budget_j();
  r.plan = stage("solve", [&] { return solve(g, cfg.fleet_max, budget, opt.solver); });
  if (opt.stagger) {
    r.stagger = stage("stagger", [&] { return stagger_departures(r.plan, g, cfg); });
    if (r.stagger->resolved) r.plan.routes = r.stagger->plan.routes;
  }
  r.plan_violations = check_plan(r.plan, g, budget, cfg.fleet_max);
  r.rollout = stage("rollout", [&] { return rollout(r.plan, g, cfg); });
  return r;
}

nlohmann::json options_to_json(const PipelineOptions& opt) {
  const auto& s = opt.solver;
  return {{"clustering", to_string(opt.clustering)},
          {"literal", opt.literal},
          {"shift", opt.shift},
          {"cluster_seed", opt.cluster_seed},
          {"hover_mode", to_string(opt.hover.mode)},
          {"hover_range_m", opt.hover.range_m},
          {"stagger", opt.stagger},
          {"solver",
           {{"algorithm", to_string(s.algorithm)},
            {"iterations", s.iterations},
            {"stall_iterations", s.stall_iterations},
            {"time_budget_s", s.time_budget_s},
            {"tabu_tenure", s.tabu_tenure},
            {"tabu_penalty_growth", s.tabu_penalty_growth},
            {"tabu_diversification", s.tabu_diversification},
            {"tabu_intensify", s.tabu_intensify},
            {"sa_initial_acceptance", s.sa_initial_acceptance},
            {"sa_initial_temperature", s.sa_initial_temperature},
            {"sa_cooling", s.sa_cooling},
            {"sa_moves_per_level", s.sa_moves_per_level},
            {"gls_lambda_factor", s.gls_lambda_factor},
            {"drop_penalty_j", s.drop_penalty_j},
            {"min_uavs", s.min_uavs},
            {"uav_penalty_j", s.uav_penalty_j},
            {"restarts", s.restarts},
            {"seed", s.seed}}}};
}

nlohmann::json pipeline_metrics_json(const PipelineResult& r, const PipelineOptions& opt) {
  nlohmann::json j{{"format", "uavdc-metrics"},
                   {"version", 1},
                   {"config_fingerprint", r.fingerprint},
                   {"options", options_to_json(opt)},
                   {"clusters", r.clustering.size()}};
  if (!r.graph) return j;
  j["plan_energy_j"] = plan_energy(r.plan, *r.graph);
  j["objective"] = r.plan.stats.objective;
  j["dropped"] = r.plan.dropped;
  j["plan_violations"] = nlohmann::json::array();
  for (const auto& v : r.plan_violations) j["plan_violations"].push_back(v.describe());
  j["rollout"] = metrics_to_json(r.rollout.metrics);
  j["rollout_violations"] = nlohmann::json::array();
  for (const auto& v : r.rollout.violations) j["rollout_violations"].push_back(v.describe());
  if (r.stagger) {
    j["stagger"] = {{"resolved", r.stagger->resolved},
                    {"delayed_uavs", r.stagger->delayed_uavs},
                    {"unresolved_uav", r.stagger->unresolved_uav},
                    {"conflicts", r.stagger->report.conflicts.size()}};
  }
  return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_artifacts(const PipelineResult& r, const PipelineOptions& opt, const MissionConfig& cfg,
                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  auto conf = to_json(cfg);
  write_json_file({{"config_fingerprint", r.fingerprint}, {"config", conf}}, path("config.json"));
  auto cl = clustering_to_json(r.clustering);
  cl["config_fingerprint"] = r.fingerprint;
  write_json_file(cl, path("clustering.json"));
  if (r.graph) {
    auto plan = plan_to_json(r.plan, *r.graph);
    plan["config_fingerprint"] = r.fingerprint;
    write_json_file(plan, path("plan.json"));
    std::ofstream trace(path("trace.csv"));
    if (!trace) throw InvalidInput("cannot write " + path("trace.csv"));
    trace << "# uavdc-trace v1 config=" << r.fingerprint << '\n';
    write_trace_csv(trace, r.rollout.traces);
  }
  write_json_file(pipeline_metrics_json(r, opt), path("metrics.json"));
}

}  // namespace uavdc
