#pragma once

#include <span>
#include <string>
#include <vector>

#include "uavdc/clustering.hpp"
#include "uavdc/config.hpp"
#include "uavdc/geometry.hpp"

namespace uavdc {

/// Where a UAV holds while collecting a CH's data.
///  - overhead: directly above the CH.
///  - range: pulled from the overhead point toward the next waypoint of the
///    route by min(range_m, distance to it). The hover point then depends on
///    the route, so the graph's static matrices hold the overhead values and
///    MissionGraph::evaluate recomputes legs per route.
enum class HoverMode { overhead, range };

struct HoverPolicy {
  HoverMode mode = HoverMode::overhead;
  double range_m = 150.0;
};

/// Collection must complete inside [open_ts, close_ts], in slots from t = 0.
struct TimeWindow {
  long long open_ts = 0;
  long long close_ts = 0;
};

struct RouteEval {
  double energy_j = 0.0;
  long long makespan_ts = 0;  // landing slot, including the departure offset
  bool on_time = true;
  bool within_horizon = true;
  long long late_ts = 0;  // summed overshoot past windows and the horizon
  int late_node = -1;  // first node whose collection completes after its window

  bool timely() const { return on_time && within_horizon; }
};

/// One visit of a route with its timing and energy.
struct Visit {
  int node = 0;
  Point hover;
  long long flight_ts = 0;  // from the previous waypoint
  long long dwell_ts = 0;
  long long arrival_ts = 0;
  long long completion_ts = 0;
  double flight_energy_j = 0.0;
  double hover_energy_j = 0.0;
};

struct Timeline {
  std::vector<Visit> visits;
  long long return_flight_ts = 0;
  double return_energy_j = 0.0;
  double energy_j = 0.0;
  long long makespan_ts = 0;
};

/// Complete directed graph over the dock (node 0) and K CHs (nodes 1..K,
/// node c + 1 is cluster c). Immutable after construction.
class MissionGraph {
 public:
  MissionGraph(const Clustering& clustering, Point dock, const MissionConfig& cfg,
               HoverPolicy hover = {});
  MissionGraph(const std::vector<Point>& heads, Point dock, const MissionConfig& cfg,
               HoverPolicy hover = {});

  int num_heads() const { return static_cast<int>(pos_.size()) - 1; }
  int num_nodes() const { return static_cast<int>(pos_.size()); }

  Point position(int node) const { return pos_[idx(node)]; }
  Point dock() const { return pos_[0]; }

  long long flight_ts(int i, int j) const { return flight_[idx(i) * n() + idx(j)]; }
  long long dwell_ts(int j) const { return dwell_[idx(j)]; }
  double flight_energy(int i, int j) const;
  double hover_energy(int j) const;
  /// flight_energy(i, j) + hover_energy(j), overhead hover points.
  double edge_energy(int i, int j) const { return edge_[idx(i) * n() + idx(j)]; }
  const TimeWindow& window(int node) const { return window_[idx(node)]; }
  long long horizon_ts() const { return window_[0].close_ts; }
  /// False when the CH's link has zero rate; such a CH can only be dropped.
  bool reachable(int node) const { return reachable_[idx(node)] != 0; }

  double speed() const { return speed_; }
  double slot_s() const { return slot_s_; }
  const EnergyParams& energy_params() const { return energy_; }
  const HoverPolicy& hover_policy() const { return hover_; }

  /// Energy and timing of dock -> visits -> dock leaving at `departure_ts`.
  RouteEval evaluate(std::span<const int> visits, long long departure_ts = 0) const;
  Timeline timeline(std::span<const int> visits, long long departure_ts = 0) const;
  std::vector<Point> hover_points(std::span<const int> visits) const;

  /// Most expensive dock -> c -> dock sortie over reachable CHs.
  double max_round_trip_energy() const;
  double mean_edge_energy() const;

 private:
  std::size_t n() const { return pos_.size(); }
  static std::size_t idx(int node) { return static_cast<std::size_t>(node); }
  void build(const std::vector<Point>& heads, Point dock, const MissionConfig& cfg);
  long long dwell_at(int node, double offset_m) const;
  // Fills hover_scratch with the route's hover points.
  void place_hover(std::span<const int> visits, std::vector<Point>& out) const;

  std::vector<Point> pos_;
  std::vector<long long> flight_;
  std::vector<long long> dwell_;
  std::vector<long long> dwell_range_;  // dwell at a full range_m offset
  std::vector<double> edge_;
  std::vector<TimeWindow> window_;
  std::vector<char> reachable_;
  double speed_ = 0.0;
  double slot_s_ = 0.0;
  double altitude_ = 0.0;
  double fly_power_ = 0.0;
  double hover_power_ = 0.0;
  CollectionMode collection_ = CollectionMode::batch;
  RadioParams radio_;
  AtgChannelParams atg_;
  EnergyParams energy_;
  HoverPolicy hover_;
};

const char* to_string(HoverMode m);
HoverPolicy hover_policy_from_string(const std::string& s);  // "overhead" | "range" | "range:R"

}  // namespace uavdc
