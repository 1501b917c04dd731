#include "uavdc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavdc/channel.hpp"
#include "uavdc/energy.hpp"
#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

constexpr long long kUnreachable = std::numeric_limits<long long>::max() / 4;

std::vector<Point> heads_of(const Clustering& c) {
  std::vector<Point> heads;
  heads.reserve(c.clusters.size());
  for (const auto& cl : c.clusters) heads.push_back(cl.head);
  return heads;
}

}  // namespace

MissionGraph::MissionGraph(const Clustering& clustering, Point dock, const MissionConfig& cfg,
                           HoverPolicy hover)
    : hover_(hover) {
  build(heads_of(clustering), dock, cfg);
}

MissionGraph::MissionGraph(const std::vector<Point>& heads, Point dock, const MissionConfig& cfg,
                           HoverPolicy hover)
    : hover_(hover) {
  build(heads, dock, cfg);
}

void MissionGraph::build(const std::vector<Point>& heads, Point dock, const MissionConfig& cfg) {
  cfg.validate();
  if (hover_.mode == HoverMode::range && !(hover_.range_m >= 0.0 && std::isfinite(hover_.range_m)))
    throw InvalidInput("hover range must be a finite non-negative distance");
  speed_ = cfg.cruise_speed;
  slot_s_ = cfg.slot_s;
  altitude_ = cfg.altitude_m;
  collection_ = cfg.collection;
  radio_ = cfg.radio;
  atg_ = cfg.atg;
  energy_ = cfg.energy;
  fly_power_ = propulsion_power(speed_, energy_);
  hover_power_ = hover_power(energy_);

  pos_.clear();
  pos_.push_back(dock);
  pos_.insert(pos_.end(), heads.begin(), heads.end());
  const std::size_t nn = pos_.size();

  flight_.assign(nn * nn, 0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = i + 1; j < nn; ++j) {
      const auto ts = flight_slots(distance(pos_[i], pos_[j]), speed_, slot_s_);
      flight_[i * nn + j] = ts;
      flight_[j * nn + i] = ts;
    }

  dwell_.assign(nn, 0);
  dwell_range_.assign(nn, 0);
  reachable_.assign(nn, 1);
  for (std::size_t j = 1; j < nn; ++j) {
    dwell_[j] = dwell_at(static_cast<int>(j), 0.0);
    reachable_[j] = dwell_[j] < kUnreachable ? 1 : 0;
    if (hover_.mode == HoverMode::range)
      dwell_range_[j] = dwell_at(static_cast<int>(j), hover_.range_m);
  }

  edge_.assign(nn * nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      if (i == j) continue;
      edge_[i * nn + j] = flight_energy(static_cast<int>(i), static_cast<int>(j)) +
                          hover_energy(static_cast<int>(j));
    }

  window_.assign(nn, TimeWindow{});
  window_[0] = {0, cfg.mission_slots()};
  for (std::size_t j = 1; j < nn; ++j)
    window_[j] = {0, cfg.deadline_slots(static_cast<int>(j) - 1)};
}

long long MissionGraph::dwell_at(int node, double offset_m) const {
  const Point ch = pos_[idx(node)];
  const Point hover{ch.x + offset_m, ch.y};
  const auto link = uplink_rate(ch, hover, altitude_, radio_, atg_);
  if (!(link.rate_bps > 0.0)) return kUnreachable;
  return collection_slots(link.rate_bps, radio_, slot_s_, collection_);
}

double MissionGraph::flight_energy(int i, int j) const {
  return fly_power_ * static_cast<double>(flight_ts(i, j)) * slot_s_;
}

double MissionGraph::hover_energy(int j) const {
  if (j == 0 || !reachable(j)) return 0.0;
  return hover_power_ * static_cast<double>(dwell_ts(j)) * slot_s_;
}

void MissionGraph::place_hover(std::span<const int> visits, std::vector<Point>& out) const {
  out.resize(visits.size());
  if (hover_.mode == HoverMode::overhead) {
    for (std::size_t k = 0; k < visits.size(); ++k) out[k] = pos_[idx(visits[k])];
    return;
  }
  // Each hover point moves toward the next waypoint, so walk backwards.
  Point next = pos_[0];
  for (std::size_t k = visits.size(); k-- > 0;) {
    out[k] = step_toward(pos_[idx(visits[k])], next, hover_.range_m);
    next = out[k];
  }
}

std::vector<Point> MissionGraph::hover_points(std::span<const int> visits) const {
  std::vector<Point> out;
  place_hover(visits, out);
  return out;
}

RouteEval MissionGraph::evaluate(std::span<const int> visits, long long departure_ts) const {
  RouteEval ev;
  ev.makespan_ts = departure_ts;
  if (visits.empty()) return ev;

  const bool overhead = hover_.mode == HoverMode::overhead;
  thread_local std::vector<Point> hover;
  if (!overhead) place_hover(visits, hover);

  long long t = departure_ts;
  long long fly_ts = 0;
  long long dwell_total = 0;
  int prev = 0;
  Point prev_pt = pos_[0];
  for (std::size_t k = 0; k < visits.size(); ++k) {
    const int c = visits[k];
    if (!reachable(c)) {
      ev.on_time = false;
      ev.late_ts += window_[0].close_ts;
      if (ev.late_node < 0) ev.late_node = c;
      continue;
    }
    long long f = 0;
    long long d = 0;
    if (overhead) {
      f = flight_ts(prev, c);
      d = dwell_ts(c);
    } else {
      const Point h = hover[k];
      f = flight_slots(distance(prev_pt, h), speed_, slot_s_);
      const double off = distance(pos_[idx(c)], h);
      if (off <= 0.0)
        d = dwell_ts(c);
      else if (std::abs(off - hover_.range_m) <= 1e-9)
        d = dwell_range_[idx(c)];
      else
        d = dwell_at(c, off);
      prev_pt = h;
    }
    t += f + d;
    fly_ts += f;
    dwell_total += d;
    if (t > window_[idx(c)].close_ts) {
      ev.on_time = false;
      ev.late_ts += t - window_[idx(c)].close_ts;
      if (ev.late_node < 0) ev.late_node = c;
    }
    prev = c;
  }
  const long long back = overhead ? flight_ts(prev, 0)
                                  : flight_slots(distance(prev_pt, pos_[0]), speed_, slot_s_);
  t += back;
  fly_ts += back;
  ev.makespan_ts = t;
  ev.within_horizon = t <= window_[0].close_ts;
  if (!ev.within_horizon) ev.late_ts += t - window_[0].close_ts;
  ev.energy_j = fly_power_ * static_cast<double>(fly_ts) * slot_s_ +
                hover_power_ * static_cast<double>(dwell_total) * slot_s_;
  return ev;
}

Timeline MissionGraph::timeline(std::span<const int> visits, long long departure_ts) const {
  Timeline tl;
  tl.makespan_ts = departure_ts;
  if (visits.empty()) return tl;
  std::vector<Point> hover;
  place_hover(visits, hover);
  long long t = departure_ts;
  Point prev_pt = pos_[0];
  for (std::size_t k = 0; k < visits.size(); ++k) {
    const int c = visits[k];
    if (c < 1 || c >= num_nodes()) throw InvalidInput("route visits unknown node " + std::to_string(c));
    Visit v;
    v.node = c;
    v.hover = hover[k];
    v.flight_ts = flight_slots(distance(prev_pt, v.hover), speed_, slot_s_);
    const double off = distance(pos_[idx(c)], v.hover);
    v.dwell_ts = off <= 0.0 ? dwell_ts(c) : dwell_at(c, off);
    v.arrival_ts = t + v.flight_ts;
    v.completion_ts = v.arrival_ts + v.dwell_ts;
    v.flight_energy_j = fly_power_ * static_cast<double>(v.flight_ts) * slot_s_;
    v.hover_energy_j = reachable(c) ? hover_power_ * static_cast<double>(v.dwell_ts) * slot_s_ : 0.0;
    t = v.completion_ts;
    tl.energy_j += v.flight_energy_j + v.hover_energy_j;
    prev_pt = v.hover;
    tl.visits.push_back(v);
  }
  tl.return_flight_ts = flight_slots(distance(prev_pt, pos_[0]), speed_, slot_s_);
  tl.return_energy_j = fly_power_ * static_cast<double>(tl.return_flight_ts) * slot_s_;
  tl.energy_j += tl.return_energy_j;
  tl.makespan_ts = t + tl.return_flight_ts;
  return tl;
}

double MissionGraph::max_round_trip_energy() const {
  double best = 0.0;
  for (int c = 1; c < num_nodes(); ++c) {
    if (!reachable(c)) continue;
    best = std::max(best, edge_energy(0, c) + flight_energy(c, 0));
  }
  return best;
}

double MissionGraph::mean_edge_energy() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (int i = 0; i < num_nodes(); ++i)
    for (int j = 0; j < num_nodes(); ++j) {
      if (i == j || !reachable(j) || !reachable(i)) continue;
      sum += edge_energy(i, j);
      ++count;
    }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

const char* to_string(HoverMode m) { return m == HoverMode::overhead ? "overhead" : "range"; }

HoverPolicy hover_policy_from_string(const std::string& s) {
  if (s == "overhead") return {HoverMode::overhead, 150.0};
  if (s == "range") return {HoverMode::range, 150.0};
  if (s.rfind("range:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double r = std::stod(s.substr(6), &used);
      if (used == s.size() - 6 && r >= 0.0 && std::isfinite(r)) return {HoverMode::range, r};
    } catch (const std::exception&) {
    }
  }
  throw InvalidInput("unknown hover mode '" + s + "' (expected overhead, range or range:R)");
}

}  // namespace uavdc
