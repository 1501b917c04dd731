#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavdc/graph.hpp"

namespace uavdc {

enum class SolverKind { greedy, descent, tabu, sa, gls, exact };

const char* to_string(SolverKind k);
SolverKind solver_from_string(const std::string& s);

struct SolverConfig {
  SolverKind algorithm = SolverKind::tabu;
  int iterations = 1000;        // search iterations; an SA iteration is one temperature level
  int stall_iterations = 250;   // stop after this many iterations without a new best (not sa)
  double time_budget_s = 600.0;
  int tabu_tenure = 15;
  double tabu_penalty_growth = 0.5;     // relaxation weight factor per iteration
  double tabu_diversification = 0.015;  // frequency surcharge on non-improving moves
  int tabu_intensify = 3;               // perturbed restarts from the best solution after a stall
  double sa_initial_acceptance = 0.8;
  double sa_initial_temperature = 0.0;  // <= 0: derived from sa_initial_acceptance
  double sa_cooling = 0.995;
  int sa_moves_per_level = 0;           // <= 0: 2 K^2 (at least 50)
  double gls_lambda_factor = 0.1;
  double drop_penalty_j = 0.0;          // <= 0: 10 x max round-trip energy
  bool min_uavs = false;
  double uav_penalty_j = 0.0;           // <= 0 with min_uavs: max round-trip energy
  int restarts = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Per-UAV cost and per-CH surcharge of the penalized objective.
struct ObjectiveWeights {
  double drop_j = 0.0;
  double uav_j = 0.0;
};

ObjectiveWeights resolve_weights(const MissionGraph& g, const SolverConfig& cfg);

struct Route {
  int uav_id = 0;
  std::vector<int> visits;         // graph node ids, 1..K
  std::vector<Point> hover_points;
  long long departure_ts = 0;
};

struct SolveStats {
  std::string algorithm;
  double objective = 0.0;
  int iterations = 0;
  double runtime_s = 0.0;
  bool budget_exceeded = false;
  std::uint64_t seed = 0;
  ObjectiveWeights weights;
  std::vector<double> best_trace;     // best penalized objective after each iteration
  std::vector<double> current_trace;  // objective of the accepted solution after each iteration
};

struct MissionPlan {
  std::vector<Route> routes;  // deployed UAVs only
  std::vector<int> dropped;   // sorted node ids
  SolveStats stats;

  int deployed() const { return static_cast<int>(routes.size()); }
  int visited() const;
};

/// Sum of route energies plus drop and UAV surcharges.
double plan_energy(const MissionPlan& plan, const MissionGraph& g);
double plan_objective(const MissionPlan& plan, const MissionGraph& g, const ObjectiveWeights& w);

/// Best plan found for at most `fleet_max` UAVs, each spending at most
/// `battery_budget_j`. Every returned route is on time, inside the mission
/// horizon and within budget.
MissionPlan solve(const MissionGraph& g, int fleet_max, double battery_budget_j,
                  const SolverConfig& cfg);

inline constexpr int kExactMaxHeads = 9;

/// Global optimum of the penalized objective by enumeration. Throws
/// InvalidInput above kExactMaxHeads CHs. Only the weight fields of `cfg`
/// are used.
MissionPlan solve_exact(const MissionGraph& g, int fleet_max, double battery_budget_j,
                        const SolverConfig& cfg = {});

struct PlanViolation {
  enum class Kind { unknown_node, duplicate, missing, unreachable, deadline, mission_time, battery,
                    fleet, hover_point };
  Kind kind;
  int uav = -1;
  int node = -1;
  double amount = 0.0;  // slots late, joules over budget, ...

  std::string describe() const;
};

const char* to_string(PlanViolation::Kind k);

/// Empty iff the plan is feasible. `fleet_max` < 0 skips the fleet check.
std::vector<PlanViolation> check_plan(const MissionPlan& plan, const MissionGraph& g,
                                      double battery_budget_j, int fleet_max = -1);

/// Fills hover points and UAV ids from the graph.
void finalize_routes(MissionPlan& plan, const MissionGraph& g);

nlohmann::json plan_to_json(const MissionPlan& plan, const MissionGraph& g);
MissionPlan plan_from_json(const nlohmann::json& j);

}  // namespace uavdc
