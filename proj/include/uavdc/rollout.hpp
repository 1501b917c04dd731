#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "uavdc/config.hpp"
#include "uavdc/energy.hpp"
#include "uavdc/graph.hpp"
#include "uavdc/solver.hpp"

namespace uavdc {

/// Activity during the slot that starts at a sample. `idle` waits at the dock
/// before departure; `done` has landed.
enum class Phase { idle, fly, hover, done };

const char* to_string(Phase p);

/// Per-slot samples t = 0..length-1 of one UAV.
struct TrajectoryTrace {
  int uav_id = 0;
  std::vector<Point> positions;
  std::vector<BatteryState> battery;
  std::vector<Phase> phase;

  std::size_t length() const { return positions.size(); }
  bool airborne(std::size_t t) const { return phase[t] == Phase::fly || phase[t] == Phase::hover; }
};

struct MissionMetrics {
  double total_energy_j = 0.0;
  std::vector<double> per_uav_energy_j;
  int visited_chs = 0;
  int deployed_uavs = 0;
  long long makespan_ts = 0;
  double min_pairwise_separation_m = std::numeric_limits<double>::infinity();
};

struct RolloutViolation {
  enum class Kind { battery, mission_time, speed };
  Kind kind;
  int uav = -1;
  long long t = -1;
  double amount = 0.0;  // joules below reserve, slots past the horizon, metres over the step limit

  std::string describe() const;
};

struct RolloutResult {
  std::vector<TrajectoryTrace> traces;
  MissionMetrics metrics;
  std::vector<RolloutViolation> violations;
};

/// Simulates every route slot by slot. Flight legs advance speed * slot per
/// slot; the last slot of a leg covers the remainder and hovers for the rest
/// of the slot. All traces share one length, the latest landing plus one.
RolloutResult rollout(const MissionPlan& plan, const MissionGraph& g, const MissionConfig& cfg);

/// Energy drawn by a trace, S(0) minus its final battery.
double trace_energy(const TrajectoryTrace& trace);

struct SeparationConflict {
  long long t = 0;
  int uav_a = 0;
  int uav_b = 0;
  double distance_m = 0.0;
};

struct SeparationReport {
  std::vector<SeparationConflict> conflicts;
  double min_distance_m = std::numeric_limits<double>::infinity();

  bool empty() const { return conflicts.empty(); }
};

/// Pairs of airborne UAVs closer than `d_safe` at a slot boundary.
SeparationReport check_separation(const std::vector<TrajectoryTrace>& traces, double d_safe);

struct StaggerResult {
  MissionPlan plan;
  bool resolved = true;
  int delayed_uavs = 0;
  int unresolved_uav = -1;
  SeparationReport report;  // remaining conflicts of the returned plan
};

/// Delays departures one slot at a time, in ascending UAV id order, until no
/// UAV conflicts with a lower id. If a delay would break a deadline or the
/// mission horizon the original plan is returned with `resolved` false.
StaggerResult stagger_departures(const MissionPlan& plan, const MissionGraph& g,
                                 const MissionConfig& cfg);

/// CSV with header t,uav,x,y,battery_j,phase; rows ordered by UAV then slot.
void write_trace_csv(std::ostream& out, const std::vector<TrajectoryTrace>& traces);

nlohmann::json metrics_to_json(const MissionMetrics& m);

}  // namespace uavdc
