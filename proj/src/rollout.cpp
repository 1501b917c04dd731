#include "uavdc/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

struct Integrator {
  double speed;
  double slot;
  double fly_power;
  double hover_power;

  std::vector<Point> pos;
  std::vector<double> used;  // energy drawn in the slot starting at t
  std::vector<Phase> phase;
  Point at;

  void fly_to(Point target) {
    const double d = distance(at, target);
    const long long n = flight_slots(d, speed, slot);
    const double step = speed * slot;
    for (long long k = 0; k < n; ++k) {
      pos.push_back(at);
      phase.push_back(Phase::fly);
      if (k + 1 < n) {
        at = step_toward(at, target, step);
        used.push_back(fly_power * slot);
      } else {
        const double frac = std::min(1.0, distance(at, target) / step);
        at = target;
        used.push_back(frac * fly_power * slot + (1.0 - frac) * hover_power * slot);
      }
    }
  }

  void hold(long long n, Phase ph, double power) {
    for (long long k = 0; k < n; ++k) {
      pos.push_back(at);
      phase.push_back(ph);
      used.push_back(power * slot);
    }
  }
};

TrajectoryTrace simulate(const Route& r, const MissionGraph& g, double initial_j) {
  Integrator in{g.speed(),
                g.slot_s(),
                propulsion_power(g.speed(), g.energy_params()),
                hover_power(g.energy_params()),
                {},
                {},
                {},
                g.dock()};
  in.hold(r.departure_ts, Phase::idle, 0.0);
  const Timeline tl = g.timeline(r.visits, r.departure_ts);
  for (const auto& v : tl.visits) {
    in.fly_to(v.hover);
    in.hold(v.dwell_ts, Phase::hover, in.hover_power);
  }
  if (!r.visits.empty()) in.fly_to(g.dock());
  // Landing sample.
  in.pos.push_back(in.at);
  in.phase.push_back(Phase::done);
  in.used.push_back(0.0);

  TrajectoryTrace tr;
  tr.uav_id = r.uav_id;
  tr.positions = std::move(in.pos);
  tr.phase = std::move(in.phase);
  tr.battery.resize(tr.positions.size());
  double spent = 0.0;
  for (std::size_t t = 0; t < tr.positions.size(); ++t) {
    tr.battery[t].joules_remaining = initial_j - spent;
    spent += in.used[t];
  }
  return tr;
}

void pad(TrajectoryTrace& tr, std::size_t length) {
  while (tr.positions.size() < length) {
    tr.positions.push_back(tr.positions.back());
    tr.battery.push_back(tr.battery.back());
    tr.phase.push_back(Phase::done);
  }
}

void conflicts_between(const TrajectoryTrace& a, const TrajectoryTrace& b, double d_safe,
                       SeparationReport& rep) {
  const std::size_t n = std::min(a.length(), b.length());
  for (std::size_t t = 0; t < n; ++t) {
    if (!a.airborne(t) || !b.airborne(t)) continue;
    const double d = distance(a.positions[t], b.positions[t]);
    rep.min_distance_m = std::min(rep.min_distance_m, d);
    if (d < d_safe) rep.conflicts.push_back({static_cast<long long>(t), a.uav_id, b.uav_id, d});
  }
}

}  // namespace

const char* to_string(Phase p) {
  switch (p) {
    case Phase::idle: return "idle";
    case Phase::fly: return "fly";
    case Phase::hover: return "hover";
    case Phase::done: return "done";
  }
  return "?";
}

std::string RolloutViolation::describe() const {
  char buf[160];
  switch (kind) {
    case Kind::battery:
      std::snprintf(buf, sizeof buf, "battery: uav %d below reserve by %.3f J at slot %lld", uav, amount, t);
      break;
    case Kind::mission_time:
      std::snprintf(buf, sizeof buf, "mission_time: uav %d lands %.0f slots after the horizon", uav, amount);
      break;
    case Kind::speed:
      std::snprintf(buf, sizeof buf, "speed: uav %d exceeds the step limit by %.6f m at slot %lld", uav, amount, t);
      break;
  }
  return buf;
}

double trace_energy(const TrajectoryTrace& trace) {
  if (trace.battery.empty()) return 0.0;
  return trace.battery.front().joules_remaining - trace.battery.back().joules_remaining;
}

RolloutResult rollout(const MissionPlan& plan, const MissionGraph& g, const MissionConfig& cfg) {
  RolloutResult res;
  const double s0 = cfg.battery.initial_j();
  const double reserve = cfg.battery.reserve_j();
  const std::size_t n = plan.routes.size();
  res.traces.resize(n);

  const auto job = [&](std::size_t u) { res.traces[u] = simulate(plan.routes[u], g, s0); };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw == 1 || n < 2) {
    for (std::size_t u = 0; u < n; ++u) job(u);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(hw, n); ++w)
      pool.emplace_back([&, w] {
        for (std::size_t u = w; u < n; u += hw) job(u);
      });
    for (auto& t : pool) t.join();
  }

  std::size_t length = 0;
  for (const auto& tr : res.traces) length = std::max(length, tr.length());
  const long long horizon = g.horizon_ts();
  const double step_limit = cfg.max_speed * cfg.slot_s + 1e-9;
  auto& m = res.metrics;
  for (std::size_t u = 0; u < n; ++u) {
    auto& tr = res.traces[u];
    const long long landing = static_cast<long long>(tr.length()) - 1;
    for (std::size_t t = 0; t < tr.length(); ++t) {
      if (tr.battery[t].joules_remaining < reserve - 1e-9) {
        res.violations.push_back({RolloutViolation::Kind::battery, tr.uav_id, static_cast<long long>(t),
                                  reserve - tr.battery[t].joules_remaining});
        break;
      }
    }
    for (std::size_t t = 0; t + 1 < tr.length(); ++t) {
      const double step = distance(tr.positions[t], tr.positions[t + 1]);
      if (step > step_limit)
        res.violations.push_back({RolloutViolation::Kind::speed, tr.uav_id, static_cast<long long>(t),
                                  step - step_limit});
    }
    if (landing > horizon)
      res.violations.push_back({RolloutViolation::Kind::mission_time, tr.uav_id, landing,
                                static_cast<double>(landing - horizon)});
    const double e = trace_energy(tr);
    m.per_uav_energy_j.push_back(e);
    m.total_energy_j += e;
    if (!plan.routes[u].visits.empty()) ++m.deployed_uavs;
    m.makespan_ts = std::max(m.makespan_ts, landing);
    pad(tr, length);
  }
  m.visited_chs = plan.visited();
  m.min_pairwise_separation_m = check_separation(res.traces, cfg.safe_distance_m).min_distance_m;
  return res;
}

SeparationReport check_separation(const std::vector<TrajectoryTrace>& traces, double d_safe) {
  SeparationReport rep;
  for (std::size_t a = 0; a < traces.size(); ++a)
    for (std::size_t b = a + 1; b < traces.size(); ++b) conflicts_between(traces[a], traces[b], d_safe, rep);
  std::sort(rep.conflicts.begin(), rep.conflicts.end(), [](const auto& x, const auto& y) {
    if (x.t != y.t) return x.t < y.t;
    if (x.uav_a != y.uav_a) return x.uav_a < y.uav_a;
    return x.uav_b < y.uav_b;
  });
  return rep;
}

StaggerResult stagger_departures(const MissionPlan& plan, const MissionGraph& g,
                                 const MissionConfig& cfg) {
  StaggerResult out;
  out.plan = plan;
  const double d_safe = cfg.safe_distance_m;
  const double s0 = cfg.battery.initial_j();
  std::vector<std::size_t> order(plan.routes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return plan.routes[a].uav_id < plan.routes[b].uav_id; });

  std::vector<TrajectoryTrace> settled;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Route& r = out.plan.routes[order[k]];
    const long long start = r.departure_ts;
    for (;;) {
      TrajectoryTrace tr = simulate(r, g, s0);
      SeparationReport rep;
      for (const auto& other : settled) conflicts_between(other, tr, d_safe, rep);
      if (rep.empty()) {
        settled.push_back(std::move(tr));
        break;
      }
      ++r.departure_ts;
      if (!g.evaluate(r.visits, r.departure_ts).timely()) {
        StaggerResult fail;
        fail.plan = plan;
        fail.resolved = false;
        fail.unresolved_uav = r.uav_id;
        RolloutResult base = rollout(plan, g, cfg);
        fail.report = check_separation(base.traces, d_safe);
        return fail;
      }
    }
    if (r.departure_ts != start) ++out.delayed_uavs;
  }
  RolloutResult after = rollout(out.plan, g, cfg);
  out.report = check_separation(after.traces, d_safe);
  out.resolved = out.report.empty();
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TrajectoryTrace>& traces) {
  out << "t,uav,x,y,battery_j,phase\n";
  char buf[160];
  for (const auto& tr : traces)
    for (std::size_t t = 0; t < tr.length(); ++t) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.3f,%.3f,%.3f,%s\n", t, tr.uav_id, tr.positions[t].x,
                    tr.positions[t].y, tr.battery[t].joules_remaining, to_string(tr.phase[t]));
      out << buf;
    }
}

nlohmann::json metrics_to_json(const MissionMetrics& m) {
  nlohmann::json j{{"total_energy_j", m.total_energy_j},
                   {"per_uav_energy_j", m.per_uav_energy_j},
                   {"visited_chs", m.visited_chs},
                   {"deployed_uavs", m.deployed_uavs},
                   {"makespan_ts", m.makespan_ts}};
  if (std::isfinite(m.min_pairwise_separation_m))
    j["min_pairwise_separation_m"] = m.min_pairwise_separation_m;
  else
    j["min_pairwise_separation_m"] = nullptr;
  return j;
}

}  // namespace uavdc
