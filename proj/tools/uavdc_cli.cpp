#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavdc/clustering.hpp"
#include "uavdc/config.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/pipeline.hpp"
#include "uavdc/rollout.hpp"
#include "uavdc/scenario.hpp"
#include "uavdc/solver.hpp"
#include "uavdc/sweep.hpp"

using namespace uavdc;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInvalid = 3;

std::vector<double> parse_numbers(const std::string& s, std::size_t expect, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput(std::string(what) + ": '" + tok + "' is not a number");
    }
  }
  if (expect != 0 && out.size() != expect)
    throw InvalidInput(std::string(what) + ": expected " + std::to_string(expect) + " comma-separated numbers");
  return out;
}

/// "a,b,c" or "start:stop:step".
std::vector<double> parse_values(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_numbers(s, 0, "--values");
  std::string t = s;
  for (char& c : t)
    if (c == ':') c = ',';
  const auto r = parse_numbers(t, 3, "--values");
  if (!(r[2] > 0.0) || r[1] < r[0]) throw InvalidInput("--values: need start:stop:step with step > 0");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = r[0] + k * r[2];
    if (v > r[1] + 1e-9 * std::max(1.0, std::abs(r[1]))) break;
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

/// Config file plus `key.path=value` overrides.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> overrides;

  void add(CLI::App* app) {
    app->add_option("--config", file, "Mission configuration (JSON)");
    app->add_option("--set", overrides, "Override a config key, e.g. battery.capacity_mah=2500")
        ->type_name("KEY=VALUE");
  }

  MissionConfig resolve() const {
    MissionConfig cfg = file.empty() ? MissionConfig{} : load_config(file);
    if (overrides.empty()) return cfg;
    json j = to_json(cfg);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidInput("--set expects KEY=VALUE, got '" + o + "'");
      const std::string key = o.substr(0, eq);
      const std::string raw = o.substr(eq + 1);
      json* node = &j;
      std::stringstream ks(key);
      std::string part;
      std::vector<std::string> parts;
      while (std::getline(ks, part, '.')) parts.push_back(part);
      for (std::size_t k = 0; k + 1 < parts.size(); ++k) node = &(*node)[parts[k]];
      json value;
      try {
        value = json::parse(raw);
      } catch (const json::parse_error&) {
        value = raw;
      }
      (*node)[parts.back()] = value;
    }
    return config_from_json(j);
  }
};

struct SolverFlags {
  std::string algorithm = "tabu";
  SolverConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--solver", algorithm, "greedy|descent|tabu|sa|gls|exact")->capture_default_str();
    app->add_flag("--min-uavs", cfg.min_uavs, "Minimize the deployed UAV count before energy");
    app->add_option("--iterations", cfg.iterations, "Search iterations")->capture_default_str();
    app->add_option("--stall", cfg.stall_iterations, "Stop after this many iterations without a new best")
        ->capture_default_str();
    app->add_option("--time-budget", cfg.time_budget_s, "Wall-clock budget per run, seconds")->capture_default_str();
    app->add_option("--restarts", cfg.restarts, "Independent seeded runs (sa)")->capture_default_str();
    app->add_option("--tabu-tenure", cfg.tabu_tenure)->capture_default_str();
    app->add_option("--sa-cooling", cfg.sa_cooling)->capture_default_str();
    app->add_option("--sa-t0", cfg.sa_initial_temperature, "SA start temperature; 0 derives it")
        ->capture_default_str();
    app->add_option("--gls-lambda", cfg.gls_lambda_factor, "GLS weight as a fraction of the mean edge energy")
        ->capture_default_str();
    app->add_option("--drop-penalty", cfg.drop_penalty_j, "Joules per dropped CH; 0 derives it")
        ->capture_default_str();
    app->add_option("--uav-penalty", cfg.uav_penalty_j, "Joules per UAV with --min-uavs; 0 derives it")
        ->capture_default_str();
    app->add_option("--solver-seed", cfg.seed)->capture_default_str();
  }

  SolverConfig resolve() const {
    SolverConfig c = cfg;
    c.algorithm = solver_from_string(algorithm);
    c.validate();
    return c;
  }
};

struct ClusterFlags {
  std::string algo = "algo1";
  bool literal = false;
  bool no_shift = false;
  long long seed = -1;

  void add(CLI::App* app) {
    app->add_option("--algo", algo, "algo1|kmeans-rerun|hca")->capture_default_str();
    app->add_flag("--literal", literal, "algo1 with a fresh random layout for every k");
    app->add_flag("--no-shift", no_shift, "Keep CHs at their cluster positions");
    app->add_option("--cluster-seed", seed, "Clustering seed; defaults to the field seed");
  }

  void apply(PipelineOptions& opt, const SensorField& field) const {
    opt.clustering = clustering_algorithm_from_string(algo);
    opt.literal = literal;
    opt.shift = !no_shift;
    opt.cluster_seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : field.seed;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

void print_metrics(const PipelineResult& r) {
  const auto& m = r.rollout.metrics;
  std::printf("clusters %zu, deployed %d UAVs, visited %d CHs, energy %.1f kJ, makespan %lld slots\n",
              r.clustering.size(), m.deployed_uavs, m.visited_chs, m.total_energy_j / 1e3, m.makespan_ts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV data collection planner"};
  app.require_subcommand(1);

  // scenario
  auto* scenario = app.add_subcommand("scenario", "Generate or validate a sensor field");
  scenario->require_subcommand(1);
  auto* gen = scenario->add_subcommand("gen", "Generate a uniform random field");
  std::string area_s = "0,0,5000,5000", dock_s, field_out;
  int count = 2000;
  std::uint64_t field_seed = 1;
  gen->add_option("--area", area_s, "x0,y0,x1,y1 in metres")->capture_default_str();
  gen->add_option("--count", count, "Number of sensors")->capture_default_str();
  gen->add_option("--dock", dock_s, "x,y of the dock; defaults to the area centre");
  gen->add_option("--seed", field_seed)->capture_default_str();
  gen->add_option("--out", field_out, "Output file")->required();
  auto* val = scenario->add_subcommand("validate", "Check a field file");
  std::string validate_path;
  val->add_option("file", validate_path)->required();

  // config
  auto* config_cmd = app.add_subcommand("config", "Print the resolved configuration and its fingerprint");
  ConfigFlags config_flags;
  config_flags.add(config_cmd);

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster a field into CHs");
  std::string field_path, clustering_path, out_path;
  ConfigFlags cluster_cfg;
  ClusterFlags cluster_flags;
  cluster->add_option("--field", field_path)->required();
  cluster_cfg.add(cluster);
  cluster_flags.add(cluster);
  cluster->add_option("--out", out_path, "Clustering JSON")->required();

  // route
  auto* route = app.add_subcommand("route", "Plan UAV routes over a clustering");
  ConfigFlags route_cfg;
  SolverFlags route_solver;
  std::string hover_s = "overhead";
  route->add_option("--field", field_path)->required();
  route->add_option("--clustering", clustering_path)->required();
  route_cfg.add(route);
  route_solver.add(route);
  route->add_option("--hover", hover_s, "overhead|range|range:R")->capture_default_str();
  route->add_option("--out", out_path, "Plan JSON")->required();

  // rollout
  auto* roll = app.add_subcommand("rollout", "Simulate a plan slot by slot");
  ConfigFlags roll_cfg;
  std::string plan_path, trace_path, metrics_path, roll_hover;
  bool stagger = false;
  roll->add_option("--field", field_path)->required();
  roll->add_option("--clustering", clustering_path)->required();
  roll->add_option("--plan", plan_path)->required();
  roll_cfg.add(roll);
  roll->add_option("--hover", roll_hover, "Override the hover mode recorded in the plan");
  roll->add_flag("--stagger", stagger, "Delay departures to clear separation conflicts");
  roll->add_option("--trace", trace_path, "Trace CSV");
  roll->add_option("--metrics", metrics_path, "Metrics JSON");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Cluster, route and simulate in one go");
  ConfigFlags pipe_cfg;
  SolverFlags pipe_solver;
  ClusterFlags pipe_cluster;
  std::string out_dir;
  bool pipe_stagger = false;
  pipe->add_option("--field", field_path)->required();
  pipe_cfg.add(pipe);
  pipe_solver.add(pipe);
  pipe_cluster.add(pipe);
  pipe->add_option("--hover", hover_s, "overhead|range|range:R")->capture_default_str();
  pipe->add_flag("--stagger", pipe_stagger, "Delay departures to clear separation conflicts");
  pipe->add_option("--out-dir", out_dir, "Directory for all artifacts")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep");
  ConfigFlags sweep_cfg;
  SolverFlags sweep_solver;
  std::string variable_s, values_s, algorithms_s;
  int reps = 20, workers = 0, sensors = 2000;
  std::uint64_t first_seed = 1;
  bool sweep_route = false, sweep_no_route = false;
  sweep->add_option("--variable", variable_s, "d_th|battery_mah|deadline_s")->required();
  sweep->add_option("--values", values_s, "v1,v2,... or start:stop:step; defaults per variable");
  sweep->add_option("--algorithms", algorithms_s,
                    "Comma-separated <clustering>[:<solver>[:<hover>]] curves; defaults per variable");
  sweep->add_option("--reps", reps, "Seeds per value")->capture_default_str();
  sweep->add_option("--first-seed", first_seed)->capture_default_str();
  sweep->add_option("--sensors", sensors)->capture_default_str();
  sweep->add_option("--workers", workers, "Worker threads; 0 uses every core")->capture_default_str();
  sweep->add_flag("--route", sweep_route, "Also route a d_th sweep");
  sweep->add_flag("--no-route", sweep_no_route, "Record clustering results only");
  sweep_cfg.add(sweep);
  sweep_solver.add(sweep);
  sweep->add_option("--out-dir", out_dir)->required();

  // plot
  auto* plot = app.add_subcommand("plot", "Draw an SVG chart from an aggregate CSV");
  std::string aggregate_path, metric_s = "energy", x_label;
  plot->add_option("--aggregate", aggregate_path)->required();
  plot->add_option("--metric", metric_s, "clusters|energy|visited|deployed")->capture_default_str();
  plot->add_option("--x-label", x_label, "Axis label; defaults to the CSV's value column");
  plot->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*scenario) {
      if (*gen) {
        const auto a = parse_numbers(area_s, 4, "--area");
        const Rect area{a[0], a[1], a[2], a[3]};
        Point dock = area.center();
        if (!dock_s.empty()) {
          const auto d = parse_numbers(dock_s, 2, "--dock");
          dock = {d[0], d[1]};
        }
        const SensorField f = generate_field(area, count, dock, field_seed);
        save_field(f, field_out);
        std::printf("wrote %zu sensors to %s\n", f.nodes.size(), field_out.c_str());
      } else {
        const SensorField f = load_field(validate_path);
        std::printf("ok: %zu sensors, area %.3f,%.3f,%.3f,%.3f, dock %.3f,%.3f, seed %llu\n", f.nodes.size(),
                    f.area.x0, f.area.y0, f.area.x1, f.area.y1, f.dock.x, f.dock.y,
                    static_cast<unsigned long long>(f.seed));
      }
      return kExitOk;
    }

    if (*config_cmd) {
      const MissionConfig cfg = config_flags.resolve();
      std::cout << json{{"config_fingerprint", fingerprint(cfg)}, {"config", to_json(cfg)}}.dump(2) << '\n';
      return kExitOk;
    }

    if (*cluster) {
      const MissionConfig cfg = cluster_cfg.resolve();
      const SensorField field = load_field(field_path);
      PipelineOptions opt;
      cluster_flags.apply(opt, field);
      const Clustering c = cluster_field(field, cfg, opt);
      json j = clustering_to_json(c);
      j["config_fingerprint"] = fingerprint(cfg);
      j["algorithm"] = opt.literal ? "algo1-literal" : to_string(opt.clustering);
      j["shifted"] = opt.shift;
      write_json_file(j, out_path);
      std::printf("%zu clusters\n", c.size());
      return kExitOk;
    }

    if (*route) {
      const MissionConfig cfg = route_cfg.resolve();
      const SensorField field = load_field(field_path);
      const Clustering c = clustering_from_json(read_json_file(clustering_path));
      const MissionGraph g(c, field.dock, cfg, hover_policy_from_string(hover_s));
      const MissionPlan plan = solve(g, cfg.fleet_max, cfg.battery.mission_budget_j(), route_solver.resolve());
      json j = plan_to_json(plan, g);
      j["config_fingerprint"] = fingerprint(cfg);
      write_json_file(j, out_path);
      std::printf("%d UAVs, %d of %d CHs, %.1f kJ\n", plan.deployed(), plan.visited(), g.num_heads(),
                  plan_energy(plan, g) / 1e3);
      return kExitOk;
    }

    if (*roll) {
      const MissionConfig cfg = roll_cfg.resolve();
      const SensorField field = load_field(field_path);
      const Clustering c = clustering_from_json(read_json_file(clustering_path));
      const json pj = read_json_file(plan_path);
      MissionPlan plan = plan_from_json(pj);
      HoverPolicy hover;
      if (!roll_hover.empty()) {
        hover = hover_policy_from_string(roll_hover);
      } else {
        hover.mode = pj.value("hover_mode", "overhead") == "range" ? HoverMode::range : HoverMode::overhead;
        hover.range_m = pj.value("hover_range_m", 150.0);
      }
      const MissionGraph g(c, field.dock, cfg, hover);
      const double budget = cfg.battery.mission_budget_j();
      const auto violations = check_plan(plan, g, budget, cfg.fleet_max);
      for (const auto& v : violations) std::fprintf(stderr, "plan: %s\n", v.describe().c_str());
      if (!violations.empty()) return kExitInfeasible;
      json extra;
      if (stagger) {
        const StaggerResult st = stagger_departures(plan, g, cfg);
        extra = {{"resolved", st.resolved}, {"delayed_uavs", st.delayed_uavs},
                 {"unresolved_uav", st.unresolved_uav}, {"conflicts", st.report.conflicts.size()}};
        if (st.resolved) plan = st.plan;
        else std::fprintf(stderr, "stagger: unresolved conflict for uav %d\n", st.unresolved_uav);
      }
      const RolloutResult r = rollout(plan, g, cfg);
      if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw InvalidInput("cannot write " + trace_path);
        out << "# uavdc-trace v1 config=" << fingerprint(cfg) << '\n';
        write_trace_csv(out, r.traces);
      }
      json m = metrics_to_json(r.metrics);
      m["config_fingerprint"] = fingerprint(cfg);
      m["violations"] = json::array();
      for (const auto& v : r.violations) m["violations"].push_back(v.describe());
      if (stagger) m["stagger"] = extra;
      if (!metrics_path.empty()) write_json_file(m, metrics_path);
      std::printf("%d UAVs, %d CHs, %.1f kJ, makespan %lld slots\n", r.metrics.deployed_uavs,
                  r.metrics.visited_chs, r.metrics.total_energy_j / 1e3, r.metrics.makespan_ts);
      for (const auto& v : r.violations) std::fprintf(stderr, "rollout: %s\n", v.describe().c_str());
      return r.violations.empty() ? kExitOk : kExitInfeasible;
    }

    if (*pipe) {
      const MissionConfig cfg = pipe_cfg.resolve();
      const SensorField field = load_field(field_path);
      PipelineOptions opt;
      pipe_cluster.apply(opt, field);
      opt.solver = pipe_solver.resolve();
      opt.hover = hover_policy_from_string(hover_s);
      opt.stagger = pipe_stagger;
      const PipelineResult r = run_pipeline(cfg, field, opt);
      write_artifacts(r, opt, cfg, out_dir);
      print_metrics(r);
      const bool bad = !r.plan_violations.empty() || !r.rollout.violations.empty();
      return bad ? kExitInfeasible : kExitOk;
    }

    if (*sweep) {
      SweepSpec spec;
      spec.variable = sweep_variable_from_string(variable_s);
      spec.base = sweep_cfg.resolve();
      spec.repetitions = reps;
      spec.first_seed = first_seed;
      spec.workers = workers;
      spec.sensors = sensors;
      const SolverConfig base_solver = sweep_solver.resolve();
      std::string algos = algorithms_s;
      switch (spec.variable) {
        case SweepVariable::d_th:
          if (values_s.empty()) values_s = "400:1000:100";
          if (algos.empty()) algos = "algo1,kmeans-rerun,hca";
          spec.route = sweep_route;
          break;
        case SweepVariable::battery_mah:
          if (values_s.empty()) values_s = "1000:4000:500";
          if (algos.empty()) algos = "algo1:tabu,algo1:sa,algo1:gls";
          break;
        case SweepVariable::deadline_s:
          if (values_s.empty()) values_s = "40:220:20";
          if (algos.empty()) algos = "algo1:tabu,algo1-noshift:tabu,algo1:tabu:range";
          break;
      }
      if (sweep_no_route) spec.route = false;
      spec.values = parse_values(values_s);
      std::stringstream as(algos);
      std::string a;
      while (std::getline(as, a, ',')) spec.algorithms.push_back(parse_sweep_algorithm(a, base_solver));

      const auto rows = run_sweep(spec);
      std::filesystem::create_directories(out_dir);
      const auto path = [&](const std::string& n) { return (std::filesystem::path(out_dir) / n).string(); };
      const std::string fp = fingerprint(spec.base);
      {
        std::ofstream o(path("rows.csv"));
        write_rows_csv(o, rows, spec.variable, fp);
        std::ofstream t(path("timing.csv"));
        write_timing_csv(t, rows, spec.variable);
        std::ofstream g(path("aggregate.csv"));
        write_aggregate_csv(g, aggregate(rows), spec.variable, fp);
      }
      // Plots are drawn from the aggregate file alone.
      std::ifstream in(path("aggregate.csv"));
      std::string column;
      const auto agg = read_aggregate_csv(in, &column);
      std::vector<PlotMetric> metrics{PlotMetric::clusters};
      if (spec.route) metrics = {PlotMetric::energy, PlotMetric::visited, PlotMetric::deployed};
      for (auto m : metrics) write_text(path(std::string(to_string(m)) + ".svg"), render_svg(agg, m, column));
      int errors = 0;
      for (const auto& r : rows) errors += r.error.empty() ? 0 : 1;
      std::printf("%zu rows (%d with errors) in %s\n", rows.size(), errors, out_dir.c_str());
      return kExitOk;
    }

    if (*plot) {
      std::ifstream in(aggregate_path);
      if (!in) throw InvalidInput("cannot read " + aggregate_path);
      std::string column;
      const auto agg = read_aggregate_csv(in, &column);
      write_text(out_path, render_svg(agg, plot_metric_from_string(metric_s), x_label.empty() ? column : x_label));
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitInvalid;
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
