#include "uavdc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

double dist2(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

bool within(Point a, Point b, double r) { return dist2(a, b) <= r * r; }

int capacity_lower_bound(std::size_t m, int max_members) {
  return static_cast<int>((m + static_cast<std::size_t>(max_members) - 1) /
                          static_cast<std::size_t>(max_members));
}

std::vector<Point> initial_heads(const SensorField& field, int k, SeedPlacement how,
                                 std::mt19937_64& rng) {
  const std::size_t n = field.size();
  std::vector<Point> heads;
  heads.reserve(static_cast<std::size_t>(k));
  switch (how) {
    case SeedPlacement::uniform_area:
      for (int c = 0; c < k; ++c)
        heads.push_back({field.area.x0 + unit_uniform(rng) * field.area.width(),
                         field.area.y0 + unit_uniform(rng) * field.area.height()});
      break;
    case SeedPlacement::random_nodes: {
      // Partial Fisher-Yates over node indices; k > n repeats positions.
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      for (int c = 0; c < k; ++c) {
        const std::size_t i = static_cast<std::size_t>(c) % n;
        const auto j = i + static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n - i));
        std::swap(idx[i], idx[std::min(j, n - 1)]);
        heads.push_back(field.nodes[static_cast<std::size_t>(idx[i])].pos);
      }
      break;
    }
    case SeedPlacement::kmeanspp: {
      std::vector<double> d2(n, std::numeric_limits<double>::infinity());
      auto pick = [&](double total) {
        double u = unit_uniform(rng) * total;
        for (std::size_t i = 0; i < n; ++i) {
          u -= d2[i];
          if (u < 0.0) return i;
        }
        return n - 1;
      };
      std::size_t first = std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * n));
      heads.push_back(field.nodes[first].pos);
      while (static_cast<int>(heads.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          d2[i] = std::min(d2[i], dist2(field.nodes[i].pos, heads.back()));
          total += d2[i];
        }
        const std::size_t i = total > 0.0 ? pick(total) : heads.size() % n;
        heads.push_back(field.nodes[i].pos);
      }
      break;
    }
  }
  return heads;
}

// Builds the output from labels; clusters that ended up empty are not CHs.
Clustering collect(const SensorField& field, const std::vector<Point>& heads,
                   const std::vector<int>& label) {
  std::vector<Cluster> by_head(heads.size());
  for (std::size_t c = 0; c < heads.size(); ++c) by_head[c].head = heads[c];
  Clustering out;
  for (const auto& n : field.nodes) {
    const int c = label[static_cast<std::size_t>(n.id)];
    if (c < 0)
      out.unassigned.push_back(n.id);
    else
      by_head[static_cast<std::size_t>(c)].members.push_back(n.id);
  }
  for (auto& cl : by_head)
    if (!cl.members.empty()) out.clusters.push_back(std::move(cl));
  return out;
}

std::size_t nearest(const std::vector<Point>& heads, Point p) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < heads.size(); ++c) {
    const double d2 = dist2(p, heads[c]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

// Nearest CH that still has room, ignoring range; nearest overall if all are full.
std::size_t nearest_with_room(const std::vector<Point>& heads, const std::vector<int>& count,
                              int max_members, Point p) {
  std::size_t best = heads.size();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < heads.size(); ++c) {
    const double d2 = dist2(p, heads[c]);
    if (d2 < best_d2 && count[c] < max_members) {
      best_d2 = d2;
      best = c;
    }
  }
  return best < heads.size() ? best : nearest(heads, p);
}

struct Assignment {
  std::vector<int> label;  // -1 = unassigned
  std::vector<int> count;
  std::vector<int> unassigned;
};

// Each SN, in `order`, joins the nearest CH that is within range and not yet
// full. Ties go to the lowest CH index.
void assign_constrained(const SensorField& field, const std::vector<Point>& heads, double range_m,
                        int max_members, const std::vector<int>& order, Assignment& a) {
  const double r2 = range_m * range_m;
  a.label.assign(field.size(), -1);
  a.count.assign(heads.size(), 0);
  a.unassigned.clear();
  for (int s : order) {
    const Point p = field.nodes[static_cast<std::size_t>(s)].pos;
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < heads.size(); ++c) {
      const double d2 = dist2(p, heads[c]);
      if (d2 < best_d2 && d2 <= r2 && a.count[c] < max_members) {
        best_d2 = d2;
        best = static_cast<int>(c);
      }
    }
    if (best < 0) {
      a.unassigned.push_back(s);
    } else {
      a.label[static_cast<std::size_t>(s)] = best;
      ++a.count[static_cast<std::size_t>(best)];
    }
  }
}

}  // namespace

const char* to_string(ClusteringAlgorithm a) {
  switch (a) {
    case ClusteringAlgorithm::algo1: return "algo1";
    case ClusteringAlgorithm::kmeans_rerun: return "kmeans-rerun";
    case ClusteringAlgorithm::hca: return "hca";
  }
  return "?";
}

ClusteringAlgorithm clustering_algorithm_from_string(const std::string& s) {
  if (s == "algo1") return ClusteringAlgorithm::algo1;
  if (s == "kmeans-rerun" || s == "kmeans") return ClusteringAlgorithm::kmeans_rerun;
  if (s == "hca") return ClusteringAlgorithm::hca;
  throw InvalidInput("unknown clustering algorithm '" + s + "'");
}

Clustering cluster_constrained_kmeans(const SensorField& field, double range_m, int max_members,
                                      std::uint64_t seed, const ConstrainedKMeansOptions& opt) {
  if (field.nodes.empty()) throw InvalidInput("clustering: empty field");
  if (!(range_m > 0.0) || max_members < 1)
    throw InvalidInput("clustering: need range > 0 and capacity >= 1");
  const int m = static_cast<int>(field.size());
  const int limit = opt.max_clusters > 0 ? opt.max_clusters : m;
  const int lower = capacity_lower_bound(field.size(), max_members);
  if (lower > limit)
    throw InvalidInput("clustering: max_clusters is below the capacity bound ceil(M/F)");

  std::mt19937_64 rng(seed);
  std::vector<int> order(field.size());
  std::iota(order.begin(), order.end(), 0);

  Assignment a;
  std::vector<int> residual;
  std::vector<Point> settled;
  for (int k = lower; k <= limit; ++k) {
    std::vector<Point> heads;
    if (opt.warm_start && !settled.empty()) {
      // Keep the previous layout; the extra CH goes where coverage failed.
      heads = settled;
      const auto pick = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(residual.size()));
      heads.push_back(field.nodes[static_cast<std::size_t>(residual[std::min(pick, residual.size() - 1)])].pos);
    } else {
      heads = initial_heads(field, k, opt.seeding, rng);
    }
    if (opt.shuffle_order) std::shuffle(order.begin(), order.end(), rng);

    std::vector<Point> next(heads.size());
    std::vector<Point> sum(heads.size());
    std::vector<int> weight;
    for (int it = 0; it < opt.max_inner_iterations; ++it) {
      assign_constrained(field, heads, range_m, max_members, order, a);

      std::fill(sum.begin(), sum.end(), Point{});
      weight = a.count;
      for (const auto& n : field.nodes) {
        const int c = a.label[static_cast<std::size_t>(n.id)];
        if (c >= 0) sum[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] + n.pos;
      }
      if (opt.stranded_pull) {
        for (int st : a.unassigned) {
          const Point p = field.nodes[static_cast<std::size_t>(st)].pos;
          const std::size_t c = nearest_with_room(heads, a.count, max_members, p);
          sum[c] = sum[c] + p;
          ++weight[c];
        }
      }
      // A CH with no members has no mean; it is re-seeded on a stranded SN.
      std::size_t stranded = 0;
      for (std::size_t c = 0; c < heads.size(); ++c) {
        if (weight[c] > 0) {
          next[c] = (1.0 / weight[c]) * sum[c];
        } else if (stranded < a.unassigned.size()) {
          next[c] = field.nodes[static_cast<std::size_t>(a.unassigned[stranded++])].pos;
        } else {
          next[c] = heads[c];
        }
      }
      double moved = 0.0;
      for (std::size_t c = 0; c < heads.size(); ++c) moved += distance(next[c], heads[c]);
      heads.swap(next);
      if (moved < opt.tolerance_m) break;
    }
    // Final pass against the settled heads so members are checked against
    // the positions actually reported.
    assign_constrained(field, heads, range_m, max_members, order, a);
    if (a.unassigned.empty()) return collect(field, heads, a.label);
    residual = a.unassigned;
    settled = heads;
  }
  std::string msg = "clustering: no feasible k <= " + std::to_string(limit) + "; " +
                    std::to_string(residual.size()) + " SNs left unassigned";
  throw Infeasible(msg);
}

Clustering cluster_kmeans_rerun(const SensorField& field, double range_m, int max_members,
                                std::uint64_t seed, int max_clusters, SeedPlacement seeding) {
  if (field.nodes.empty()) throw InvalidInput("clustering: empty field");
  if (!(range_m > 0.0) || max_members < 1)
    throw InvalidInput("clustering: need range > 0 and capacity >= 1");
  const int m = static_cast<int>(field.size());
  const int limit = max_clusters > 0 ? max_clusters : m;
  const int lower = capacity_lower_bound(field.size(), max_members);
  std::mt19937_64 rng(seed);
  constexpr int kMaxIterations = 300;

  std::vector<int> label(field.size());
  for (int k = lower; k <= limit; ++k) {
    std::vector<Point> heads = initial_heads(field, k, seeding, rng);
    std::vector<Point> sum(heads.size());
    std::vector<int> count(heads.size());
    for (int it = 0; it < kMaxIterations; ++it) {
      std::fill(sum.begin(), sum.end(), Point{});
      std::fill(count.begin(), count.end(), 0);
      for (const auto& n : field.nodes) {
        const std::size_t best = nearest(heads, n.pos);
        label[static_cast<std::size_t>(n.id)] = static_cast<int>(best);
        sum[best] = sum[best] + n.pos;
        ++count[best];
      }
      double moved = 0.0;
      for (std::size_t c = 0; c < heads.size(); ++c) {
        if (count[c] == 0) continue;
        const Point mean = (1.0 / count[c]) * sum[c];
        moved += distance(mean, heads[c]);
        heads[c] = mean;
      }
      if (moved < 1e-6) break;
    }
    // Lloyd's final step moved the heads; relabel before checking limits.
    std::fill(count.begin(), count.end(), 0);
    for (const auto& n : field.nodes) {
      const std::size_t best = nearest(heads, n.pos);
      label[static_cast<std::size_t>(n.id)] = static_cast<int>(best);
      ++count[best];
    }
    bool ok = std::all_of(count.begin(), count.end(), [&](int c) { return c <= max_members; });
    for (std::size_t s = 0; ok && s < field.size(); ++s)
      ok = within(field.nodes[s].pos, heads[static_cast<std::size_t>(label[s])], range_m);
    if (ok) return collect(field, heads, label);
  }
  throw Infeasible("kmeans-rerun: no feasible k <= " + std::to_string(limit));
}

Clustering cluster_hca(const SensorField& field, double range_m, int max_members) {
  if (field.nodes.empty()) throw InvalidInput("clustering: empty field");
  if (!(range_m > 0.0) || max_members < 1)
    throw InvalidInput("clustering: need range > 0 and capacity >= 1");
  const std::size_t n = field.size();
  // Complete-linkage distance above 2r means some pair of members is more
  // than 2r apart, so no centroid can be within r of both.
  const double cutoff = 2.0 * range_m;

  std::vector<double> link(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      link[i * n + j] = distance(field.nodes[i].pos, field.nodes[j].pos);

  std::vector<std::vector<int>> members(n);
  std::vector<Point> sum(n);
  std::vector<int> version(n, 0);
  std::vector<char> active(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {static_cast<int>(i)};
    sum[i] = field.nodes[i].pos;
  }

  struct Entry {
    double d;
    int i, j, vi, vj;
    bool operator>(const Entry& o) const {
      if (d != o.d) return d > o.d;
      if (i != o.i) return i > o.i;
      return j > o.j;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (link[i * n + j] <= cutoff)
        heap.push({link[i * n + j], static_cast<int>(i), static_cast<int>(j), 0, 0});

  while (!heap.empty()) {
    const Entry e = heap.top();
    heap.pop();
    const auto i = static_cast<std::size_t>(e.i);
    const auto j = static_cast<std::size_t>(e.j);
    if (!active[i] || !active[j] || version[i] != e.vi || version[j] != e.vj) continue;
    const std::size_t size = members[i].size() + members[j].size();
    if (size > static_cast<std::size_t>(max_members)) continue;
    const Point c = (1.0 / static_cast<double>(size)) * (sum[i] + sum[j]);
    bool ok = true;
    for (const auto* group : {&members[i], &members[j]})
      for (int s : *group)
        if (!within(field.nodes[static_cast<std::size_t>(s)].pos, c, range_m)) {
          ok = false;
          break;
        }
    if (!ok) continue;

    members[i].insert(members[i].end(), members[j].begin(), members[j].end());
    members[j].clear();
    sum[i] = sum[i] + sum[j];
    active[j] = 0;
    ++version[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i) continue;
      const double d = std::max(link[i * n + k], link[j * n + k]);
      link[i * n + k] = d;
      link[k * n + i] = d;
      if (d <= cutoff) {
        const auto lo = std::min(i, k), hi = std::max(i, k);
        heap.push({d, static_cast<int>(lo), static_cast<int>(hi), version[lo], version[hi]});
      }
    }
  }

  Clustering out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    Cluster cl;
    cl.head = (1.0 / static_cast<double>(members[i].size())) * sum[i];
    cl.members = std::move(members[i]);
    std::sort(cl.members.begin(), cl.members.end());
    out.clusters.push_back(std::move(cl));
  }
  return out;
}

Clustering run_clustering(ClusteringAlgorithm algo, const SensorField& field, double range_m,
                          int max_members, std::uint64_t seed) {
  switch (algo) {
    case ClusteringAlgorithm::algo1:
      return cluster_constrained_kmeans(field, range_m, max_members, seed);
    case ClusteringAlgorithm::kmeans_rerun:
      return cluster_kmeans_rerun(field, range_m, max_members, seed);
    case ClusteringAlgorithm::hca:
      return cluster_hca(field, range_m, max_members);
  }
  throw InvalidInput("unknown clustering algorithm");
}

Clustering shift_toward_dock(const Clustering& clustering, const SensorField& field, Point dock,
                             double range_m, const ShiftOptions& opt) {
  Clustering out = clustering;
  const double limit = range_m - opt.margin_m;
  for (auto& cl : out.clusters) {
    const double full = distance(cl.head, dock);
    if (full == 0.0 || cl.members.empty()) continue;
    const Point origin = cl.head;
    auto reach = [&](double s) {
      const Point h = step_toward(origin, dock, s);
      double worst = 0.0;
      for (int m : cl.members)
        worst = std::max(worst, distance(field.nodes[static_cast<std::size_t>(m)].pos, h));
      return worst;
    };
    if (reach(0.0) > limit) continue;
    double s = full;
    if (reach(full) > limit) {
      // The farthest-member distance is convex in s, so the feasible steps
      // form an interval starting at 0.
      double lo = 0.0, hi = full;
      while (hi - lo > opt.tolerance_m) {
        const double mid = 0.5 * (lo + hi);
        (reach(mid) <= limit ? lo : hi) = mid;
      }
      s = lo;
    }
    cl.head = step_toward(origin, dock, s);
  }
  return out;
}

std::string ClusteringViolation::describe() const {
  switch (kind) {
    case Kind::capacity:
      return "cluster " + std::to_string(cluster) + ": " + std::to_string(static_cast<int>(value)) +
             " members exceeds capacity";
    case Kind::radius:
      return "cluster " + std::to_string(cluster) + ": SN " + std::to_string(node) + " at " +
             std::to_string(value) + " m exceeds range";
    case Kind::duplicate:
      return "SN " + std::to_string(node) + " appears in more than one cluster (cluster " +
             std::to_string(cluster) + ")";
    case Kind::missing:
      return "SN " + std::to_string(node) + " is not assigned to any cluster";
    case Kind::unknown_node:
      return "cluster " + std::to_string(cluster) + ": unknown SN id " + std::to_string(node);
  }
  return "?";
}

std::vector<ClusteringViolation> validate_clustering(const Clustering& c, const SensorField& field,
                                                     double range_m, int max_members) {
  using K = ClusteringViolation::Kind;
  std::vector<ClusteringViolation> out;
  std::vector<int> seen(field.size(), 0);
  for (std::size_t ci = 0; ci < c.clusters.size(); ++ci) {
    const auto& cl = c.clusters[ci];
    const int cid = static_cast<int>(ci);
    if (cl.members.size() > static_cast<std::size_t>(max_members))
      out.push_back({K::capacity, cid, -1, static_cast<double>(cl.members.size())});
    for (int s : cl.members) {
      if (s < 0 || static_cast<std::size_t>(s) >= field.size()) {
        out.push_back({K::unknown_node, cid, s, 0.0});
        continue;
      }
      if (seen[static_cast<std::size_t>(s)]++) out.push_back({K::duplicate, cid, s, 0.0});
      const Point p = field.nodes[static_cast<std::size_t>(s)].pos;
      if (!within(p, cl.head, range_m)) out.push_back({K::radius, cid, s, distance(p, cl.head)});
    }
  }
  for (std::size_t s = 0; s < field.size(); ++s)
    if (!seen[s]) out.push_back({K::missing, -1, static_cast<int>(s), 0.0});
  return out;
}

nlohmann::json clustering_to_json(const Clustering& c) {
  nlohmann::json clusters = nlohmann::json::array();
  for (std::size_t i = 0; i < c.clusters.size(); ++i) {
    const auto& cl = c.clusters[i];
    clusters.push_back({{"id", i}, {"x", cl.head.x}, {"y", cl.head.y}, {"members", cl.members}});
  }
  return {{"clusters", clusters}, {"unassigned", c.unassigned}};
}

Clustering clustering_from_json(const nlohmann::json& j) {
  Clustering c;
  try {
    for (const auto& e : j.at("clusters")) {
      Cluster cl;
      cl.head = {e.at("x").get<double>(), e.at("y").get<double>()};
      cl.members = e.at("members").get<std::vector<int>>();
      c.clusters.push_back(std::move(cl));
    }
    if (j.contains("unassigned")) c.unassigned = j.at("unassigned").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("clustering file: ") + e.what());
  }
  return c;
}

}  // namespace uavdc
