#include "uavdc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "uavdc/energy.hpp"
#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int below(std::mt19937_64& rng, int n) {
  return static_cast<int>(unit(rng) * n);
}

struct RouteState {
  std::vector<int> v;
  RouteEval ev;
  double cost = 0.0;  // energy + UAV surcharge + guide and relaxation penalties
};

struct Solution {
  std::vector<RouteState> routes;  // fleet_max slots, empty ones included
  std::vector<int> dropped;
  double objective = 0.0;  // true penalized objective
  double augmented = 0.0;  // sum of route costs plus drop surcharges
  long long late_ts = 0;   // window and horizon overshoot, relaxed search only
  double excess_j = 0.0;   // energy above the battery budget, relaxed search only

  bool feasible() const { return late_ts == 0 && excess_j <= kEps; }
};

struct Move {
  enum Kind { relocate, swap, two_opt, cross, drop, insert, exchange } kind = relocate;
  int r1 = -1, i = 0, len = 1;  // source route, position, segment length
  int r2 = -1, j = 0;           // target route and position
  int d = -1;                   // index into dropped
};

struct Candidate {
  Move m;
  std::vector<int> a, b;  // new contents of r1 and r2
  RouteEval ea, eb;
  double ca = 0.0, cb = 0.0;
  double delta = 0.0;       // on the augmented objective
  double delta_true = 0.0;  // on the penalized objective
  long long late_delta = 0;
  double excess_delta = 0.0;
  int moved[3] = {-1, -1, -1};
};

bool two_routes(const Move& m) {
  if (m.kind == Move::insert || m.kind == Move::cross) return true;
  return (m.kind == Move::relocate || m.kind == Move::swap) && m.r1 != m.r2;
}

class Search {
 public:
  Search(const MissionGraph& g, int fleet, double budget, ObjectiveWeights w)
      : g_(g), fleet_(fleet), budget_(budget), w_(w) {}

  const MissionGraph& graph() const { return g_; }
  const ObjectiveWeights& weights() const { return w_; }

  void set_guide(const std::vector<double>* penalties, double lambda) {
    pen_ = penalties;
    lambda_ = lambda;
  }

  /// Lets routes break windows and the battery budget at a price of
  /// `per_slot` per late slot and `per_joule` per joule of overdraw.
  void set_relaxation(double per_slot, double per_joule) {
    relaxed_ = true;
    alpha_ = per_slot;
    beta_ = per_joule;
  }

  bool feasible(const RouteEval& ev) const { return ev.timely() && ev.energy_j <= budget_ + kEps; }
  double excess(const RouteEval& ev) const { return std::max(0.0, ev.energy_j - budget_); }

  double cost(const std::vector<int>& v, const RouteEval& ev) const {
    double c = true_cost(v, ev) + guide(v);
    if (relaxed_) c += alpha_ * static_cast<double>(ev.late_ts) + beta_ * excess(ev);
    return c;
  }

  double true_cost(const std::vector<int>& v, const RouteEval& ev) const {
    return v.empty() ? 0.0 : ev.energy_j + w_.uav_j;
  }

  double guide(const std::vector<int>& v) const {
    if (pen_ == nullptr || v.empty()) return 0.0;
    const auto n = static_cast<std::size_t>(g_.num_nodes());
    double s = 0.0;
    int prev = 0;
    for (int c : v) {
      s += (*pen_)[static_cast<std::size_t>(prev) * n + static_cast<std::size_t>(c)];
      prev = c;
    }
    s += (*pen_)[static_cast<std::size_t>(prev) * n];
    return lambda_ * s;
  }

  void refresh(RouteState& r) const {
    r.ev = g_.evaluate(r.v);
    r.cost = cost(r.v, r.ev);
  }

  void totals(Solution& s) const {
    double obj = w_.drop_j * static_cast<double>(s.dropped.size());
    double aug = obj;
    s.late_ts = 0;
    s.excess_j = 0.0;
    for (const auto& r : s.routes) {
      obj += true_cost(r.v, r.ev);
      aug += r.cost;
      s.late_ts += r.ev.late_ts;
      s.excess_j += excess(r.ev);
    }
    s.objective = obj;
    s.augmented = aug;
  }

  void refresh_all(Solution& s) const {
    for (auto& r : s.routes) refresh(r);
    totals(s);
  }

  int first_empty(const Solution& s) const {
    for (int r = 0; r < static_cast<int>(s.routes.size()); ++r)
      if (s.routes[static_cast<std::size_t>(r)].v.empty()) return r;
    return -1;
  }

  /// Builds the routes a move produces. False if the move is malformed or
  /// leaves a route infeasible.
  bool build(const Solution& s, const Move& m, Candidate& c) const {
    c.m = m;
    c.moved[0] = c.moved[1] = c.moved[2] = -1;
    c.a.clear();
    c.b.clear();
    const auto& R = s.routes;
    double drop_delta = 0.0;
    switch (m.kind) {
      case Move::relocate: {
        const auto& v1 = R[sz(m.r1)].v;
        if (m.i < 0 || m.len < 1 || m.i + m.len > static_cast<int>(v1.size())) return false;
        for (int k = 0; k < m.len && k < 3; ++k) c.moved[k] = v1[sz(m.i + k)];
        c.a.assign(v1.begin(), v1.begin() + m.i);
        c.a.insert(c.a.end(), v1.begin() + m.i + m.len, v1.end());
        if (m.r1 == m.r2) {
          if (m.j < 0 || m.j > static_cast<int>(c.a.size()) || m.j == m.i) return false;
          c.a.insert(c.a.begin() + m.j, v1.begin() + m.i, v1.begin() + m.i + m.len);
        } else {
          const auto& v2 = R[sz(m.r2)].v;
          if (m.j < 0 || m.j > static_cast<int>(v2.size())) return false;
          c.b.assign(v2.begin(), v2.begin() + m.j);
          c.b.insert(c.b.end(), v1.begin() + m.i, v1.begin() + m.i + m.len);
          c.b.insert(c.b.end(), v2.begin() + m.j, v2.end());
        }
        break;
      }
      case Move::swap: {
        const auto& v1 = R[sz(m.r1)].v;
        if (m.i < 0 || m.i >= static_cast<int>(v1.size())) return false;
        if (m.r1 == m.r2) {
          if (m.j <= m.i || m.j >= static_cast<int>(v1.size())) return false;
          c.a = v1;
          std::swap(c.a[sz(m.i)], c.a[sz(m.j)]);
          c.moved[0] = v1[sz(m.i)];
          c.moved[1] = v1[sz(m.j)];
        } else {
          const auto& v2 = R[sz(m.r2)].v;
          if (m.j < 0 || m.j >= static_cast<int>(v2.size())) return false;
          c.a = v1;
          c.b = v2;
          std::swap(c.a[sz(m.i)], c.b[sz(m.j)]);
          c.moved[0] = v1[sz(m.i)];
          c.moved[1] = v2[sz(m.j)];
        }
        break;
      }
      case Move::two_opt: {
        const auto& v1 = R[sz(m.r1)].v;
        if (m.i < 0 || m.j <= m.i || m.j >= static_cast<int>(v1.size())) return false;
        c.a = v1;
        std::reverse(c.a.begin() + m.i, c.a.begin() + m.j + 1);
        c.moved[0] = v1[sz(m.i)];
        c.moved[1] = v1[sz(m.j)];
        break;
      }
      case Move::cross: {
        // Tail exchange: a = v1[..i) + v2[j..), b = v2[..j) + v1[i..).
        const auto& v1 = R[sz(m.r1)].v;
        const auto& v2 = R[sz(m.r2)].v;
        if (m.r1 >= m.r2 || m.i < 0 || m.i > static_cast<int>(v1.size()) || m.j < 0 ||
            m.j > static_cast<int>(v2.size()))
          return false;
        c.a.assign(v1.begin(), v1.begin() + m.i);
        c.a.insert(c.a.end(), v2.begin() + m.j, v2.end());
        c.b.assign(v2.begin(), v2.begin() + m.j);
        c.b.insert(c.b.end(), v1.begin() + m.i, v1.end());
        if (m.i < static_cast<int>(v1.size())) c.moved[0] = v1[sz(m.i)];
        if (m.j < static_cast<int>(v2.size())) c.moved[1] = v2[sz(m.j)];
        break;
      }
      case Move::drop: {
        const auto& v1 = R[sz(m.r1)].v;
        if (m.i < 0 || m.i >= static_cast<int>(v1.size())) return false;
        c.a = v1;
        c.a.erase(c.a.begin() + m.i);
        c.moved[0] = v1[sz(m.i)];
        drop_delta = w_.drop_j;
        break;
      }
      case Move::insert: {
        if (m.d < 0 || m.d >= static_cast<int>(s.dropped.size())) return false;
        const int node = s.dropped[sz(m.d)];
        if (!g_.reachable(node)) return false;
        const auto& v2 = R[sz(m.r2)].v;
        if (m.j < 0 || m.j > static_cast<int>(v2.size())) return false;
        c.b = v2;
        c.b.insert(c.b.begin() + m.j, node);
        c.moved[0] = node;
        drop_delta = -w_.drop_j;
        break;
      }
      case Move::exchange: {
        if (m.d < 0 || m.d >= static_cast<int>(s.dropped.size())) return false;
        const int node = s.dropped[sz(m.d)];
        if (!g_.reachable(node)) return false;
        const auto& v1 = R[sz(m.r1)].v;
        if (m.i < 0 || m.i >= static_cast<int>(v1.size())) return false;
        c.a = v1;
        c.a[sz(m.i)] = node;
        c.moved[0] = v1[sz(m.i)];
        c.moved[1] = node;
        break;
      }
    }

    double old_cost = 0.0;
    double old_true = 0.0;
    double new_true = drop_delta;
    c.delta = drop_delta;
    c.late_delta = 0;
    c.excess_delta = 0.0;
    const auto account = [&](const std::vector<int>& nv, const RouteEval& ne, const RouteState& old) {
      old_cost += old.cost;
      old_true += true_cost(old.v, old.ev);
      new_true += true_cost(nv, ne);
      c.late_delta += ne.late_ts - old.ev.late_ts;
      c.excess_delta += excess(ne) - excess(old.ev);
    };
    if (m.kind != Move::insert) {
      c.ea = g_.evaluate(c.a);
      if (!relaxed_ && !feasible(c.ea)) return false;
      c.ca = cost(c.a, c.ea);
      c.delta += c.ca;
      account(c.a, c.ea, R[sz(m.r1)]);
    }
    if (two_routes(m)) {
      c.eb = g_.evaluate(c.b);
      if (!relaxed_ && !feasible(c.eb)) return false;
      c.cb = cost(c.b, c.eb);
      c.delta += c.cb;
      account(c.b, c.eb, R[sz(m.r2)]);
    }
    c.delta -= old_cost;
    c.delta_true = new_true - old_true;
    return true;
  }

  void apply(Solution& s, const Candidate& c) const {
    const Move& m = c.m;
    if (m.kind != Move::insert) {
      auto& r = s.routes[sz(m.r1)];
      r.v = c.a;
      r.ev = c.ea;
      r.cost = c.ca;
    }
    if (two_routes(m)) {
      auto& r = s.routes[sz(m.r2)];
      r.v = c.b;
      r.ev = c.eb;
      r.cost = c.cb;
    }
    if (m.kind == Move::drop) s.dropped.push_back(c.moved[0]);
    if (m.kind == Move::insert) s.dropped.erase(s.dropped.begin() + m.d);
    if (m.kind == Move::exchange) s.dropped[sz(m.d)] = c.moved[0];
    totals(s);
  }

  /// Calls f(move) for every move of the neighborhood in a fixed order.
  template <class F>
  void scan(const Solution& s, F&& f) const {
    const int nr = static_cast<int>(s.routes.size());
    const int empty = first_empty(s);
    const auto target_ok = [&](int r) { return !s.routes[sz(r)].v.empty() || r == empty; };
    Move m;
    for (int r1 = 0; r1 < nr; ++r1) {
      const int n1 = static_cast<int>(s.routes[sz(r1)].v.size());
      if (n1 == 0) continue;
      // relocate and or-opt
      for (int len = 1; len <= 3 && len <= n1; ++len)
        for (int i = 0; i + len <= n1; ++i)
          for (int r2 = 0; r2 < nr; ++r2) {
            if (!target_ok(r2)) continue;
            if (r2 != r1 && len == n1 && s.routes[sz(r2)].v.empty()) continue;
            const int n2 = r2 == r1 ? n1 - len : static_cast<int>(s.routes[sz(r2)].v.size());
            for (int j = 0; j <= n2; ++j) {
              if (r2 == r1 && j == i) continue;
              m = Move{Move::relocate, r1, i, len, r2, j, -1};
              f(m);
            }
          }
      // swap
      for (int i = 0; i < n1; ++i) {
        for (int j = i + 1; j < n1; ++j) {
          m = Move{Move::swap, r1, i, 1, r1, j, -1};
          f(m);
        }
        for (int r2 = r1 + 1; r2 < nr; ++r2) {
          const int n2 = static_cast<int>(s.routes[sz(r2)].v.size());
          for (int j = 0; j < n2; ++j) {
            m = Move{Move::swap, r1, i, 1, r2, j, -1};
            f(m);
          }
        }
      }
      // tail exchange between used routes; cutting both at 0 or both at the
      // end only relabels the routes
      for (int r2 = r1 + 1; r2 < nr; ++r2) {
        const int n2 = static_cast<int>(s.routes[sz(r2)].v.size());
        if (n2 == 0) continue;
        for (int i = 0; i <= n1; ++i)
          for (int j = 0; j <= n2; ++j) {
            if ((i == 0 && j == 0) || (i == n1 && j == n2)) continue;
            m = Move{Move::cross, r1, i, 1, r2, j, -1};
            f(m);
          }
      }
      // 2-opt; a length-2 reversal is the same as the adjacent swap
      for (int i = 0; i < n1; ++i)
        for (int j = i + 2; j < n1; ++j) {
          m = Move{Move::two_opt, r1, i, 1, r1, j, -1};
          f(m);
        }
      // drop and exchange with a dropped CH
      for (int i = 0; i < n1; ++i) {
        m = Move{Move::drop, r1, i, 1, -1, 0, -1};
        f(m);
        for (int d = 0; d < static_cast<int>(s.dropped.size()); ++d) {
          m = Move{Move::exchange, r1, i, 1, -1, 0, d};
          f(m);
        }
      }
    }
    // undrop
    for (int d = 0; d < static_cast<int>(s.dropped.size()); ++d) {
      if (!g_.reachable(s.dropped[sz(d)])) continue;
      for (int r2 = 0; r2 < nr; ++r2) {
        if (!target_ok(r2)) continue;
        const int n2 = static_cast<int>(s.routes[sz(r2)].v.size());
        for (int j = 0; j <= n2; ++j) {
          m = Move{Move::insert, -1, 0, 1, r2, j, d};
          f(m);
        }
      }
    }
  }

  /// Draws one move uniformly by kind, then by position. False when the
  /// drawn kind has no instance in `s`.
  bool random_move(const Solution& s, std::mt19937_64& rng, Move& m) const {
    const int nr = static_cast<int>(s.routes.size());
    thread_local std::vector<int> used;
    used.clear();
    for (int r = 0; r < nr; ++r)
      if (!s.routes[sz(r)].v.empty()) used.push_back(r);
    const int empty = first_empty(s);
    const auto pick_target = [&](int& r2) {
      const int extra = empty >= 0 ? 1 : 0;
      const int k = below(rng, static_cast<int>(used.size()) + extra);
      r2 = k < static_cast<int>(used.size()) ? used[sz(k)] : empty;
    };
    const int kind = below(rng, 7);
    if (used.empty() && kind != Move::insert) return false;
    m = Move{};
    switch (kind) {
      case Move::relocate: {
        m.kind = Move::relocate;
        m.r1 = used[sz(below(rng, static_cast<int>(used.size())))];
        const int n1 = static_cast<int>(s.routes[sz(m.r1)].v.size());
        m.len = 1 + below(rng, std::min(3, n1));
        m.i = below(rng, n1 - m.len + 1);
        pick_target(m.r2);
        const int n2 = m.r2 == m.r1 ? n1 - m.len : static_cast<int>(s.routes[sz(m.r2)].v.size());
        m.j = below(rng, n2 + 1);
        if (m.r2 == m.r1 && m.j == m.i) return false;
        return true;
      }
      case Move::swap: {
        m.kind = Move::swap;
        m.r1 = used[sz(below(rng, static_cast<int>(used.size())))];
        m.r2 = used[sz(below(rng, static_cast<int>(used.size())))];
        m.i = below(rng, static_cast<int>(s.routes[sz(m.r1)].v.size()));
        m.j = below(rng, static_cast<int>(s.routes[sz(m.r2)].v.size()));
        if (m.r1 == m.r2) {
          if (m.i == m.j) return false;
          if (m.j < m.i) std::swap(m.i, m.j);
        }
        return true;
      }
      case Move::two_opt: {
        m.kind = Move::two_opt;
        m.r1 = used[sz(below(rng, static_cast<int>(used.size())))];
        const int n1 = static_cast<int>(s.routes[sz(m.r1)].v.size());
        if (n1 < 3) return false;
        m.i = below(rng, n1);
        m.j = below(rng, n1);
        if (m.j < m.i) std::swap(m.i, m.j);
        return m.j >= m.i + 2;
      }
      case Move::cross: {
        if (used.size() < 2) return false;
        m.kind = Move::cross;
        m.r1 = used[sz(below(rng, static_cast<int>(used.size())))];
        m.r2 = used[sz(below(rng, static_cast<int>(used.size())))];
        if (m.r1 == m.r2) return false;
        if (m.r1 > m.r2) std::swap(m.r1, m.r2);
        const int n1 = static_cast<int>(s.routes[sz(m.r1)].v.size());
        const int n2 = static_cast<int>(s.routes[sz(m.r2)].v.size());
        m.i = below(rng, n1 + 1);
        m.j = below(rng, n2 + 1);
        return !((m.i == 0 && m.j == 0) || (m.i == n1 && m.j == n2));
      }
      case Move::drop: {
        m.kind = Move::drop;
        m.r1 = used[sz(below(rng, static_cast<int>(used.size())))];
        m.i = below(rng, static_cast<int>(s.routes[sz(m.r1)].v.size()));
        return true;
      }
      case Move::insert: {
        if (s.dropped.empty()) return false;
        m.kind = Move::insert;
        m.d = below(rng, static_cast<int>(s.dropped.size()));
        pick_target(m.r2);
        if (m.r2 < 0) return false;
        m.j = below(rng, static_cast<int>(s.routes[sz(m.r2)].v.size()) + 1);
        return true;
      }
      default: {
        if (s.dropped.empty()) return false;
        m.kind = Move::exchange;
        m.d = below(rng, static_cast<int>(s.dropped.size()));
        m.r1 = used[sz(below(rng, static_cast<int>(used.size())))];
        m.i = below(rng, static_cast<int>(s.routes[sz(m.r1)].v.size()));
        return true;
      }
    }
  }

  Solution greedy() const {
    Solution s;
    s.routes.resize(sz(std::max(fleet_, 0)));
    const int K = g_.num_heads();
    std::vector<char> done(sz(K + 1), 0);
    int left = 0;
    for (int c = 1; c <= K; ++c) {
      if (g_.reachable(c))
        ++left;
      else
        s.dropped.push_back(c);
    }
    for (int c : s.dropped) done[sz(c)] = 1;
    const std::size_t unreachable = s.dropped.size();
    std::vector<int> trial;
    for (auto& r : s.routes) {
      if (left == 0) break;
      int cur = 0;
      for (;;) {
        int best = -1;
        double best_e = kInf;
        trial = r.v;
        trial.push_back(0);
        for (int c = 1; c <= K; ++c) {
          if (done[sz(c)]) continue;
          const double e = g_.edge_energy(cur, c);
          if (e >= best_e) continue;
          trial.back() = c;
          if (!feasible(g_.evaluate(trial))) continue;
          best = c;
          best_e = e;
        }
        if (best < 0) break;
        r.v.push_back(best);
        done[sz(best)] = 1;
        --left;
        cur = best;
      }
      if (r.v.empty()) break;
    }
    for (int c = 1; c <= K; ++c)
      if (!done[sz(c)]) s.dropped.push_back(c);
    std::inplace_merge(s.dropped.begin(), s.dropped.begin() + static_cast<std::ptrdiff_t>(unreachable),
                       s.dropped.end());
    refresh_all(s);
    return s;
  }

 private:
  static std::size_t sz(int i) { return static_cast<std::size_t>(i); }

  const MissionGraph& g_;
  int fleet_;
  double budget_;
  ObjectiveWeights w_;
  const std::vector<double>* pen_ = nullptr;
  double lambda_ = 0.0;
  bool relaxed_ = false;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

struct RunResult {
  Solution best;
  SolveStats stats;
};

struct Budget {
  Clock::time_point start = Clock::now();
  double limit_s;
  bool exceeded = false;

  bool out() {
    if (!exceeded && seconds_since(start) > limit_s) exceeded = true;
    return exceeded;
  }
};

void record(SolveStats& st, const Solution& cur, const Solution& best) {
  st.current_trace.push_back(cur.objective);
  st.best_trace.push_back(best.objective);
}

// Best-improvement descent on the objective selected by `aug`.
bool best_improving(const Search& S, const Solution& s, bool aug, Candidate& best, Candidate& tmp) {
  bool found = false;
  double best_delta = -1e-7;
  S.scan(s, [&](const Move& m) {
    if (!S.build(s, m, tmp)) return;
    const double d = aug ? tmp.delta : tmp.delta_true;
    if (d < best_delta) {
      best_delta = d;
      std::swap(best, tmp);
      found = true;
    }
  });
  return found;
}

void run_descent(const Search& S, const SolverConfig& cfg, Solution s, RunResult& out) {
  Budget budget{Clock::now(), cfg.time_budget_s};
  Candidate best, tmp;
  int it = 0;
  while (it < cfg.iterations) {
    if (budget.out()) break;
    if (!best_improving(S, s, false, best, tmp)) break;
    S.apply(s, best);
    ++it;
    record(out.stats, s, s);
  }
  out.best = std::move(s);
  out.stats.iterations = it;
  out.stats.budget_exceeded = budget.exceeded;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive within a route, order-free across routes.
std::uint64_t route_hash(const std::vector<int>& v) {
  std::uint64_t h = 0;
  for (int c : v) h = mix(h ^ static_cast<std::uint64_t>(c));
  return v.empty() ? 0 : h;
}

std::uint64_t dropped_hash(int node) { return mix(0x5bd1e995ULL + static_cast<std::uint64_t>(node)); }

std::uint64_t solution_hash(const Solution& s) {
  std::uint64_t h = 0;
  for (const auto& r : s.routes) h += route_hash(r.v);
  for (int c : s.dropped) h += dropped_hash(c);
  return h;
}

std::uint64_t candidate_hash(const Solution& s, std::uint64_t h, const Candidate& c) {
  const Move& m = c.m;
  if (m.kind != Move::insert) h += route_hash(c.a) - route_hash(s.routes[static_cast<std::size_t>(m.r1)].v);
  if (two_routes(m)) h += route_hash(c.b) - route_hash(s.routes[static_cast<std::size_t>(m.r2)].v);
  if (m.kind == Move::drop) h += dropped_hash(c.moved[0]);
  if (m.kind == Move::insert) h -= dropped_hash(c.moved[0]);
  if (m.kind == Move::exchange) h += dropped_hash(c.moved[0]) - dropped_hash(c.moved[1]);
  return h;
}

struct Placement {
  int node, from, to;  // route indices; the dropped pool is fleet_max
};

int placements(const Candidate& c, int pool, Placement out[3]) {
  const Move& m = c.m;
  int n = 0;
  switch (m.kind) {
    case Move::relocate:
      if (m.r1 != m.r2)
        for (int k = 0; k < 3 && c.moved[k] > 0; ++k) out[n++] = {c.moved[k], m.r1, m.r2};
      break;
    case Move::swap:
      if (m.r1 != m.r2) {
        out[n++] = {c.moved[0], m.r1, m.r2};
        out[n++] = {c.moved[1], m.r2, m.r1};
      }
      break;
    case Move::drop: out[n++] = {c.moved[0], m.r1, pool}; break;
    case Move::insert: out[n++] = {c.moved[0], pool, m.r2}; break;
    case Move::exchange:
      out[n++] = {c.moved[0], m.r1, pool};
      out[n++] = {c.moved[1], pool, m.r1};
      break;
    case Move::cross:
      // Tabu on the first CH of each moved tail.
      if (c.moved[0] > 0) out[n++] = {c.moved[0], m.r1, m.r2};
      if (c.moved[1] > 0) out[n++] = {c.moved[1], m.r2, m.r1};
      break;
    case Move::two_opt: break;
  }
  return n;
}

// Attributes: a CH that left a route (or the dropped pool) may not re-enter
// it for `tenure` iterations. Recently visited solutions are also tabu, which
// keeps intra-route moves from undoing each other. The walk may cross
// solutions that break windows or the battery budget; their overshoot is
// priced by weights that grow while the current solution is infeasible and
// shrink while it is feasible. Non-improving moves pay a surcharge that grows
// with how often they have placed the same CH in the same route.
void run_tabu(const Search& S0, const SolverConfig& cfg, Solution s, RunResult& out) {
  Budget budget{Clock::now(), cfg.time_budget_s};
  const MissionGraph& g = S0.graph();
  const int K = g.num_heads();
  const int pool = static_cast<int>(s.routes.size());
  const int tenure = std::max(1, std::min(cfg.tabu_tenure, K));
  const auto width = static_cast<std::size_t>(pool + 1);
  std::vector<int> tabu_until(static_cast<std::size_t>(K + 1) * width, -1);
  std::vector<int> freq(static_cast<std::size_t>(K + 1) * width, 0);
  const auto cell = [&](const Placement& p) {
    return static_cast<std::size_t>(p.node) * width + static_cast<std::size_t>(p.to);
  };
  std::vector<std::uint64_t> recent;
  std::size_t recent_head = 0;
  const std::size_t recent_cap = static_cast<std::size_t>(2 * tenure);
  std::uint64_t h = solution_hash(s);
  recent.push_back(h);

  Search S = S0;
  const double slot_energy = propulsion_power(g.speed(), g.energy_params()) * g.slot_s();
  double alpha = slot_energy;
  double beta = 1.0;
  const double grow = 1.0 + cfg.tabu_penalty_growth;
  S.set_relaxation(alpha, beta);
  S.refresh_all(s);

  Solution best = s;
  Candidate pick, pick_tabu, tmp;
  Placement pl[3];
  int it = 0;
  int since_best = 0;
  int restarts_left = cfg.tabu_intensify;
  std::mt19937_64 rng(cfg.seed);
  Move kick;
  while (it < cfg.iterations) {
    if (budget.out()) break;
    if (since_best >= cfg.stall_iterations) {
      if (restarts_left-- <= 0) break;
      // Resume from a random feasible perturbation of the best solution with
      // fresh short-term memory.
      s = best;
      S0.refresh_all(s);
      const int kicks = std::max(2, K / 8);
      for (int k = 0, done = 0; k < 50 * kicks && done < kicks; ++k) {
        if (!S0.random_move(s, rng, kick) || kick.kind == Move::drop || kick.kind == Move::exchange) continue;
        if (!S0.build(s, kick, tmp)) continue;
        S0.apply(s, tmp);
        ++done;
      }
      std::fill(tabu_until.begin(), tabu_until.end(), -1);
      h = solution_hash(s);
      recent.assign(1, h);
      recent_head = 0;
      alpha = slot_energy;
      beta = 1.0;
      S.set_relaxation(alpha, beta);
      S.refresh_all(s);
      since_best = 0;
    }
    double d_free = kInf, d_tabu = kInf;
    bool have_free = false, have_tabu = false;
    int deployed = 0;
    for (const auto& r : s.routes) deployed += r.v.empty() ? 0 : 1;
    const double div_scale = cfg.tabu_diversification *
                             std::sqrt(static_cast<double>(K) * std::max(1, deployed)) /
                             static_cast<double>(it + 1);
    S.scan(s, [&](const Move& m) {
      if (!S.build(s, m, tmp)) return;
      const int np = placements(tmp, pool, pl);
      bool is_tabu = false;
      for (int k = 0; k < np && !is_tabu; ++k)
        if (tabu_until[cell(pl[k])] > it) is_tabu = true;
      if (!is_tabu) is_tabu = std::find(recent.begin(), recent.end(), candidate_hash(s, h, tmp)) != recent.end();
      if (is_tabu) {
        const bool feasible_after = s.late_ts + tmp.late_delta == 0 && s.excess_j + tmp.excess_delta <= 1e-6;
        if (feasible_after && s.objective + tmp.delta_true < best.objective - 1e-7) is_tabu = false;
      }
      double score = tmp.delta;
      if (score >= 0.0 && np > 0) {
        int f = 0;
        for (int k = 0; k < np; ++k) f += freq[cell(pl[k])];
        score += div_scale * (s.augmented + tmp.delta) * f;
      }
      if (!is_tabu) {
        if (score < d_free) {
          d_free = score;
          std::swap(pick, tmp);
          have_free = true;
        }
      } else if (!have_free && score < d_tabu) {
        d_tabu = score;
        std::swap(pick_tabu, tmp);
        have_tabu = true;
      }
    });
    if (!have_free && !have_tabu) break;
    const Candidate& c = have_free ? pick : pick_tabu;
    h = candidate_hash(s, h, c);
    const int np = placements(c, pool, pl);
    S.apply(s, c);
    for (int k = 0; k < np; ++k) {
      ++freq[cell(pl[k])];
      Placement back = pl[k];
      back.to = pl[k].from;
      tabu_until[cell(back)] = it + 1 + tenure;
    }
    if (recent.size() < recent_cap) {
      recent.push_back(h);
    } else {
      recent[recent_head] = h;
      recent_head = (recent_head + 1) % recent_cap;
    }
    ++it;
    if (s.feasible() && s.objective < best.objective - 1e-7) {
      best = s;
      since_best = 0;
    } else {
      ++since_best;
    }
    alpha = std::clamp(s.late_ts > 0 ? alpha * grow : alpha / grow, 1e-3 * slot_energy, 1e6 * slot_energy);
    beta = std::clamp(s.excess_j > 1e-6 ? beta * grow : beta / grow, 1e-3, 1e6);
    S.set_relaxation(alpha, beta);
    S.refresh_all(s);
    record(out.stats, s, best);
  }
  S0.refresh_all(best);
  out.best = std::move(best);
  out.stats.iterations = it;
  out.stats.budget_exceeded = budget.exceeded;
}

double initial_temperature(const Search& S, const SolverConfig& cfg, const Solution& s,
                           std::mt19937_64& rng) {
  if (cfg.sa_initial_temperature > 0.0) return cfg.sa_initial_temperature;
  // Mean uphill step among sampled moves, ignoring coverage changes whose
  // surcharge would dominate the scale.
  Candidate tmp;
  Move m;
  double sum = 0.0;
  int n = 0;
  for (int k = 0; k < 2000 && n < 200; ++k) {
    if (!S.random_move(s, rng, m)) continue;
    if (m.kind == Move::drop || m.kind == Move::insert) continue;
    if (!S.build(s, m, tmp)) continue;
    if (tmp.delta_true > 1e-7) {
      sum += tmp.delta_true;
      ++n;
    }
  }
  if (n == 0) return 1.0;
  return -(sum / n) / std::log(cfg.sa_initial_acceptance);
}

void run_sa(const Search& S, const SolverConfig& cfg, Solution s, RunResult& out) {
  Budget budget{Clock::now(), cfg.time_budget_s};
  std::mt19937_64 rng(cfg.seed);
  const int K = S.graph().num_heads();
  const int chain = cfg.sa_moves_per_level > 0 ? cfg.sa_moves_per_level : std::max(50, 2 * K * K);
  double T = initial_temperature(S, cfg, s, rng);
  Solution best = s;
  Candidate tmp;
  Move m;
  int it = 0;
  while (it < cfg.iterations) {
    if (budget.out()) break;
    for (int k = 0; k < chain; ++k) {
      if (!S.random_move(s, rng, m)) continue;
      if (!S.build(s, m, tmp)) continue;
      const double d = tmp.delta_true;
      if (d > 0.0 && !(unit(rng) < std::exp(-d / T))) continue;
      S.apply(s, tmp);
      if (s.objective < best.objective - 1e-7) best = s;
    }
    T *= cfg.sa_cooling;
    ++it;
    record(out.stats, s, best);
  }
  out.best = std::move(best);
  out.stats.iterations = it;
  out.stats.budget_exceeded = budget.exceeded;
}

void run_gls(const Search& S0, const SolverConfig& cfg, Solution s, RunResult& out) {
  Budget budget{Clock::now(), cfg.time_budget_s};
  const MissionGraph& g = S0.graph();
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<double> pen(n * n, 0.0);
  Search S = S0;
  S.set_guide(&pen, cfg.gls_lambda_factor * g.mean_edge_energy());
  S.refresh_all(s);
  Solution best = s;
  Candidate pick, tmp;
  int it = 0;
  int since_best = 0;
  while (it < cfg.iterations && since_best < cfg.stall_iterations) {
    if (budget.out()) break;
    if (best_improving(S, s, true, pick, tmp)) {
      S.apply(s, pick);
    } else {
      // Penalize the used edges of maximal utility.
      double top = -1.0;
      std::vector<std::size_t> hit;
      for (const auto& r : s.routes) {
        if (r.v.empty()) continue;
        int prev = 0;
        for (std::size_t k = 0; k <= r.v.size(); ++k) {
          const int next = k < r.v.size() ? r.v[k] : 0;
          const std::size_t e = static_cast<std::size_t>(prev) * n + static_cast<std::size_t>(next);
          const double util = g.edge_energy(prev, next) / (1.0 + pen[e]);
          if (util > top + 1e-9) {
            top = util;
            hit.assign(1, e);
          } else if (util > top - 1e-9) {
            hit.push_back(e);
          }
          prev = next;
        }
      }
      if (hit.empty()) break;
      for (auto e : hit) pen[e] += 1.0;
      S.refresh_all(s);
    }
    ++it;
    if (s.objective < best.objective - 1e-7) {
      best = s;
      since_best = 0;
    } else {
      ++since_best;
    }
    record(out.stats, s, best);
  }
  S0.refresh_all(best);
  out.best = std::move(best);
  out.stats.iterations = it;
  out.stats.budget_exceeded = budget.exceeded;
}

MissionPlan to_plan(const Solution& s, const MissionGraph& g) {
  MissionPlan plan;
  for (const auto& r : s.routes) {
    if (r.v.empty()) continue;
    Route route;
    route.visits = r.v;
    plan.routes.push_back(std::move(route));
  }
  plan.dropped = s.dropped;
  std::sort(plan.dropped.begin(), plan.dropped.end());
  finalize_routes(plan, g);
  return plan;
}

RunResult run_once(const MissionGraph& g, int fleet, double budget, const ObjectiveWeights& w,
                   const SolverConfig& cfg) {
  Search S(g, fleet, budget, w);
  RunResult out;
  Solution init = S.greedy();
  switch (cfg.algorithm) {
    case SolverKind::greedy:
      out.best = std::move(init);
      break;
    case SolverKind::descent:
      run_descent(S, cfg, std::move(init), out);
      break;
    case SolverKind::tabu:
      run_tabu(S, cfg, std::move(init), out);
      break;
    case SolverKind::sa:
      run_sa(S, cfg, std::move(init), out);
      break;
    case SolverKind::gls:
      run_gls(S, cfg, std::move(init), out);
      break;
    case SolverKind::exact:
      break;
  }
  return out;
}

}  // namespace

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::greedy: return "greedy";
    case SolverKind::descent: return "descent";
    case SolverKind::tabu: return "tabu";
    case SolverKind::sa: return "sa";
    case SolverKind::gls: return "gls";
    case SolverKind::exact: return "exact";
  }
  return "?";
}

SolverKind solver_from_string(const std::string& s) {
  for (auto k : {SolverKind::greedy, SolverKind::descent, SolverKind::tabu, SolverKind::sa,
                 SolverKind::gls, SolverKind::exact})
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown solver '" + s + "' (expected greedy, descent, tabu, sa, gls or exact)");
}

void SolverConfig::validate() const {
  if (iterations < 1) throw InvalidInput("solver iterations must be positive");
  if (stall_iterations < 1) throw InvalidInput("solver stall_iterations must be positive");
  if (!(time_budget_s > 0.0)) throw InvalidInput("solver time budget must be positive");
  if (tabu_tenure < 1) throw InvalidInput("tabu tenure must be positive");
  if (!(sa_initial_acceptance > 0.0 && sa_initial_acceptance < 1.0))
    throw InvalidInput("sa initial acceptance must lie in (0, 1)");
  if (!(sa_cooling > 0.0 && sa_cooling < 1.0)) throw InvalidInput("sa cooling rate must lie in (0, 1)");
  if (!(gls_lambda_factor > 0.0)) throw InvalidInput("gls penalty factor must be positive");
  if (restarts < 1) throw InvalidInput("solver restarts must be positive");
  if (!std::isfinite(drop_penalty_j) || !std::isfinite(uav_penalty_j))
    throw InvalidInput("solver penalties must be finite");
}

ObjectiveWeights resolve_weights(const MissionGraph& g, const SolverConfig& cfg) {
  ObjectiveWeights w;
  const double rt = g.max_round_trip_energy();
  w.drop_j = cfg.drop_penalty_j > 0.0 ? cfg.drop_penalty_j : 10.0 * rt;
  if (cfg.min_uavs) w.uav_j = cfg.uav_penalty_j > 0.0 ? cfg.uav_penalty_j : rt;
  if (w.drop_j <= 0.0) w.drop_j = 1.0;
  return w;
}

int MissionPlan::visited() const {
  int n = 0;
  for (const auto& r : routes) n += static_cast<int>(r.visits.size());
  return n;
}

double plan_energy(const MissionPlan& plan, const MissionGraph& g) {
  double e = 0.0;
  for (const auto& r : plan.routes) e += g.evaluate(r.visits, r.departure_ts).energy_j;
  return e;
}

double plan_objective(const MissionPlan& plan, const MissionGraph& g, const ObjectiveWeights& w) {
  double obj = w.drop_j * static_cast<double>(plan.dropped.size());
  for (const auto& r : plan.routes)
    if (!r.visits.empty()) obj += g.evaluate(r.visits, r.departure_ts).energy_j + w.uav_j;
  return obj;
}

void finalize_routes(MissionPlan& plan, const MissionGraph& g) {
  for (std::size_t u = 0; u < plan.routes.size(); ++u) {
    plan.routes[u].uav_id = static_cast<int>(u);
    plan.routes[u].hover_points = g.hover_points(plan.routes[u].visits);
  }
}

MissionPlan solve(const MissionGraph& g, int fleet_max, double battery_budget_j,
                  const SolverConfig& cfg) {
  cfg.validate();
  if (fleet_max < 0) throw InvalidInput("fleet size must be non-negative");
  if (!(battery_budget_j >= 0.0)) throw InvalidInput("battery budget must be non-negative");
  if (cfg.algorithm == SolverKind::exact) return solve_exact(g, fleet_max, battery_budget_j, cfg);

  const auto t0 = Clock::now();
  const ObjectiveWeights w = resolve_weights(g, cfg);
  const bool seeded = cfg.algorithm == SolverKind::sa;
  const int runs = seeded ? cfg.restarts : 1;
  std::vector<RunResult> results(static_cast<std::size_t>(runs));
  const auto job = [&](int k) {
    SolverConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(k);
    results[static_cast<std::size_t>(k)] = run_once(g, fleet_max, battery_budget_j, w, c);
    results[static_cast<std::size_t>(k)].stats.seed = c.seed;
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (runs == 1 || hw == 1) {
    for (int k = 0; k < runs; ++k) job(k);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < runs; ++k) {
      pool.emplace_back(job, k);
      if (pool.size() >= hw) {
        for (auto& t : pool) t.join();
        pool.clear();
      }
    }
    for (auto& t : pool) t.join();
  }
  std::size_t pick = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].best.objective < results[pick].best.objective - 1e-7) pick = k;

  MissionPlan plan = to_plan(results[pick].best, g);
  plan.stats = std::move(results[pick].stats);
  plan.stats.algorithm = to_string(cfg.algorithm);
  plan.stats.weights = w;
  plan.stats.objective = plan_objective(plan, g, w);
  plan.stats.runtime_s = seconds_since(t0);
  if (!seeded) plan.stats.seed = cfg.seed;
  return plan;
}

MissionPlan solve_exact(const MissionGraph& g, int fleet_max, double battery_budget_j,
                        const SolverConfig& cfg) {
  const int K = g.num_heads();
  if (K > kExactMaxHeads)
    throw InvalidInput("exact solver handles at most " + std::to_string(kExactMaxHeads) +
                       " CHs, got " + std::to_string(K));
  if (fleet_max < 0) throw InvalidInput("fleet size must be non-negative");
  const auto t0 = Clock::now();
  const ObjectiveWeights w = resolve_weights(g, cfg);
  const std::size_t full = std::size_t{1} << K;

  // Cheapest feasible single route for every subset.
  std::vector<double> route_cost(full, kInf);
  std::vector<std::vector<int>> route_order(full);
  route_cost[0] = 0.0;
  std::vector<int> perm;
  for (std::size_t S = 1; S < full; ++S) {
    perm.clear();
    bool ok = true;
    for (int c = 0; c < K; ++c)
      if (S & (std::size_t{1} << c)) {
        if (!g.reachable(c + 1)) ok = false;
        perm.push_back(c + 1);
      }
    if (!ok) continue;
    do {
      const auto ev = g.evaluate(perm);
      if (ev.timely() && ev.energy_j <= battery_budget_j + kEps && ev.energy_j < route_cost[S] - 1e-9) {
        route_cost[S] = ev.energy_j;
        route_order[S] = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  // Partition DP: cover[u][S] = cheapest way to serve exactly S with u routes.
  const int U = std::min(fleet_max, K);
  std::vector<std::vector<double>> cover(static_cast<std::size_t>(U + 1), std::vector<double>(full, kInf));
  std::vector<std::vector<std::size_t>> last(static_cast<std::size_t>(U + 1), std::vector<std::size_t>(full, 0));
  cover[0][0] = 0.0;
  for (int u = 1; u <= U; ++u) {
    auto& cur = cover[static_cast<std::size_t>(u)];
    const auto& prev = cover[static_cast<std::size_t>(u - 1)];
    for (std::size_t S = 1; S < full; ++S) {
      const std::size_t low = S & (~S + 1);
      for (std::size_t T = S; T != 0; T = (T - 1) & S) {
        if (!(T & low) || route_cost[T] == kInf) continue;
        const double v = prev[S ^ T] + route_cost[T];
        if (v < cur[S] - 1e-9) {
          cur[S] = v;
          last[static_cast<std::size_t>(u)][S] = T;
        }
      }
    }
  }
  double best = kInf;
  int best_u = 0;
  std::size_t best_S = 0;
  for (int u = 0; u <= U; ++u)
    for (std::size_t S = 0; S < full; ++S) {
      const double c = cover[static_cast<std::size_t>(u)][S];
      if (c == kInf) continue;
      const int served = std::popcount(S);
      const double obj = c + w.uav_j * u + w.drop_j * (K - served);
      if (obj < best - 1e-9) {
        best = obj;
        best_u = u;
        best_S = S;
      }
    }

  MissionPlan plan;
  std::size_t S = best_S;
  std::vector<std::vector<int>> routes;
  for (int u = best_u; u > 0; --u) {
    const std::size_t T = last[static_cast<std::size_t>(u)][S];
    routes.push_back(route_order[T]);
    S ^= T;
  }
  std::reverse(routes.begin(), routes.end());
  for (auto& v : routes) {
    Route r;
    r.visits = std::move(v);
    plan.routes.push_back(std::move(r));
  }
  for (int c = 0; c < K; ++c)
    if (!(best_S & (std::size_t{1} << c))) plan.dropped.push_back(c + 1);
  finalize_routes(plan, g);
  plan.stats.algorithm = "exact";
  plan.stats.weights = w;
  plan.stats.objective = plan_objective(plan, g, w);
  plan.stats.runtime_s = seconds_since(t0);
  return plan;
}

const char* to_string(PlanViolation::Kind k) {
  switch (k) {
    case PlanViolation::Kind::unknown_node: return "unknown_node";
    case PlanViolation::Kind::duplicate: return "duplicate";
    case PlanViolation::Kind::missing: return "missing";
    case PlanViolation::Kind::unreachable: return "unreachable";
    case PlanViolation::Kind::deadline: return "deadline";
    case PlanViolation::Kind::mission_time: return "mission_time";
    case PlanViolation::Kind::battery: return "battery";
    case PlanViolation::Kind::fleet: return "fleet";
    case PlanViolation::Kind::hover_point: return "hover_point";
  }
  return "?";
}

std::string PlanViolation::describe() const {
  std::string s = to_string(kind);
  if (uav >= 0) s += " uav " + std::to_string(uav);
  if (node >= 0) s += " node " + std::to_string(node);
  switch (kind) {
    case Kind::deadline:
    case Kind::mission_time: s += ": " + std::to_string(static_cast<long long>(amount)) + " slots late"; break;
    case Kind::battery: s += ": over budget by " + std::to_string(amount) + " J"; break;
    case Kind::fleet: s += ": " + std::to_string(static_cast<long long>(amount)) + " routes"; break;
    case Kind::hover_point: s += ": off by " + std::to_string(amount) + " m"; break;
    default: break;
  }
  return s;
}

std::vector<PlanViolation> check_plan(const MissionPlan& plan, const MissionGraph& g,
                                      double battery_budget_j, int fleet_max) {
  using K = PlanViolation::Kind;
  std::vector<PlanViolation> out;
  const int nn = g.num_nodes();
  std::vector<char> seen(static_cast<std::size_t>(nn), 0);
  const auto mark = [&](int node, int uav) {
    if (node < 1 || node >= nn) {
      out.push_back({K::unknown_node, uav, node, 0.0});
      return false;
    }
    if (seen[static_cast<std::size_t>(node)]) out.push_back({K::duplicate, uav, node, 0.0});
    seen[static_cast<std::size_t>(node)] = 1;
    return true;
  };

  for (const auto& r : plan.routes) {
    bool valid = true;
    for (int c : r.visits) valid = mark(c, r.uav_id) && valid;
    if (!valid || r.visits.empty()) continue;
    for (int c : r.visits)
      if (!g.reachable(c)) out.push_back({K::unreachable, r.uav_id, c, 0.0});
    const Timeline tl = g.timeline(r.visits, r.departure_ts);
    for (const auto& v : tl.visits) {
      const long long close = g.window(v.node).close_ts;
      if (g.reachable(v.node) && v.completion_ts > close)
        out.push_back({K::deadline, r.uav_id, v.node, static_cast<double>(v.completion_ts - close)});
      if (r.hover_points.size() == r.visits.size()) {
        const double off = distance(r.hover_points[&v - tl.visits.data()], v.hover);
        if (off > 1e-6) out.push_back({K::hover_point, r.uav_id, v.node, off});
      }
    }
    if (!r.hover_points.empty() && r.hover_points.size() != r.visits.size())
      out.push_back({K::hover_point, r.uav_id, -1, 0.0});
    if (tl.makespan_ts > g.horizon_ts())
      out.push_back({K::mission_time, r.uav_id, -1, static_cast<double>(tl.makespan_ts - g.horizon_ts())});
    if (tl.energy_j > battery_budget_j + 1e-6)
      out.push_back({K::battery, r.uav_id, -1, tl.energy_j - battery_budget_j});
  }
  for (int c : plan.dropped) mark(c, -1);
  for (int c = 1; c < nn; ++c)
    if (!seen[static_cast<std::size_t>(c)]) out.push_back({K::missing, -1, c, 0.0});
  if (fleet_max >= 0 && plan.deployed() > fleet_max)
    out.push_back({K::fleet, -1, -1, static_cast<double>(plan.deployed())});
  return out;
}

nlohmann::json plan_to_json(const MissionPlan& plan, const MissionGraph& g) {
  using nlohmann::json;
  json routes = json::array();
  double total = 0.0;
  for (const auto& r : plan.routes) {
    const Timeline tl = g.timeline(r.visits, r.departure_ts);
    json visits = json::array();
    double fly = tl.return_energy_j, hov = 0.0;
    for (const auto& v : tl.visits) {
      fly += v.flight_energy_j;
      hov += v.hover_energy_j;
      visits.push_back({{"node", v.node},
                        {"hover", {v.hover.x, v.hover.y}},
                        {"flight_ts", v.flight_ts},
                        {"arrival_ts", v.arrival_ts},
                        {"dwell_ts", v.dwell_ts},
                        {"completion_ts", v.completion_ts},
                        {"deadline_ts", g.window(v.node).close_ts},
                        {"flight_energy_j", v.flight_energy_j},
                        {"hover_energy_j", v.hover_energy_j}});
    }
    total += tl.energy_j;
    routes.push_back({{"uav", r.uav_id},
                      {"departure_ts", r.departure_ts},
                      {"visits", visits},
                      {"return_flight_ts", tl.return_flight_ts},
                      {"makespan_ts", tl.makespan_ts},
                      {"flight_energy_j", fly},
                      {"hover_energy_j", hov},
                      {"energy_j", tl.energy_j}});
  }
  const auto& st = plan.stats;
  return {{"format", "uavdc-plan"},
          {"version", 1},
          {"solver",
           {{"algorithm", st.algorithm},
            {"seed", st.seed},
            {"iterations", st.iterations},
            {"runtime_s", st.runtime_s},
            {"budget_exceeded", st.budget_exceeded},
            {"objective", st.objective},
            {"drop_penalty_j", st.weights.drop_j},
            {"uav_penalty_j", st.weights.uav_j}}},
          {"hover_mode", to_string(g.hover_policy().mode)},
          {"hover_range_m", g.hover_policy().range_m},
          {"heads", g.num_heads()},
          {"deployed", plan.deployed()},
          {"visited", plan.visited()},
          {"total_energy_j", total},
          {"dropped", plan.dropped},
          {"routes", routes}};
}

MissionPlan plan_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "uavdc-plan") throw InvalidInput("not a plan file");
    if (j.at("version").get<int>() != 1) throw InvalidInput("unsupported plan version");
    MissionPlan plan;
    for (const auto& r : j.at("routes")) {
      Route route;
      route.uav_id = r.at("uav").get<int>();
      route.departure_ts = r.at("departure_ts").get<long long>();
      for (const auto& v : r.at("visits")) {
        route.visits.push_back(v.at("node").get<int>());
        const auto& h = v.at("hover");
        route.hover_points.push_back({h.at(0).get<double>(), h.at(1).get<double>()});
      }
      plan.routes.push_back(std::move(route));
    }
    plan.dropped = j.at("dropped").get<std::vector<int>>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      plan.stats.algorithm = s.value("algorithm", "");
      plan.stats.seed = s.value("seed", std::uint64_t{0});
      plan.stats.iterations = s.value("iterations", 0);
      plan.stats.runtime_s = s.value("runtime_s", 0.0);
      plan.stats.budget_exceeded = s.value("budget_exceeded", false);
      plan.stats.objective = s.value("objective", 0.0);
      plan.stats.weights.drop_j = s.value("drop_penalty_j", 0.0);
      plan.stats.weights.uav_j = s.value("uav_penalty_j", 0.0);
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed plan file: ") + e.what());
  }
}

}  // namespace uavdc
