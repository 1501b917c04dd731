#include <algorithm>
#include <random>
#include <set>

#include <doctest.h>

#include "uavdc/clustering.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/scenario.hpp"

using namespace uavdc;

namespace {

SensorField make_field(const std::vector<Point>& pts, Rect area = {0, 0, 5000, 5000}, Point dock = {2500, 2500}) {
  SensorField f;
  f.area = area;
  f.dock = dock;
  for (std::size_t i = 0; i < pts.size(); ++i) f.nodes.push_back({static_cast<int>(i), pts[i]});
  return f;
}

Point centroid(const SensorField& f) {
  Point c;
  for (const auto& n : f.nodes) c = c + n.pos;
  return (1.0 / static_cast<double>(f.size())) * c;
}

double sum_dock_distance(const Clustering& c, Point dock) {
  double s = 0.0;
  for (const auto& cl : c.clusters) s += distance(cl.head, dock);
  return s;
}

}  // namespace

TEST_CASE("algo1 on a small tight field returns one cluster at the centroid") {
  const auto f = generate_field({1000, 1000, 1200, 1200}, 80, {1100, 1100}, 4);
  const auto c = cluster_constrained_kmeans(f, 600, 120, 1);
  REQUIRE(c.size() == 1);
  CHECK(c.clusters[0].head.x == doctest::Approx(centroid(f).x));
  CHECK(c.clusters[0].head.y == doctest::Approx(centroid(f).y));
  CHECK(c.clusters[0].members.size() == 80);

  // k-means rerun must agree: both start and stop at k = 1.
  const auto r = cluster_kmeans_rerun(f, 600, 120, 1);
  REQUIRE(r.size() == 1);
  CHECK(r.clusters[0].head.x == doctest::Approx(c.clusters[0].head.x));
  CHECK(r.clusters[0].head.y == doctest::Approx(c.clusters[0].head.y));
}

TEST_CASE("capacity one forces a CH on every SN") {
  const auto f = generate_field({0, 0, 2000, 2000}, 25, {0, 0}, 9);
  // Plain Lloyd iterations may leave empty clusters at k = M, so k-means
  // rerun is not expected to reach the singleton layout.
  for (auto algo : {ClusteringAlgorithm::algo1, ClusteringAlgorithm::hca}) {
    CAPTURE(to_string(algo));
    const auto c = run_clustering(algo, f, 600, 1, 3);
    REQUIRE(c.size() == 25);
    for (const auto& cl : c.clusters) {
      REQUIRE(cl.members.size() == 1);
      CHECK(distance(cl.head, f.nodes[cl.members[0]].pos) < 1e-6);
    }
  }
}

TEST_CASE("single SN and two-SN HCA cases") {
  const auto one = make_field({{100, 100}});
  for (auto algo : {ClusteringAlgorithm::algo1, ClusteringAlgorithm::kmeans_rerun, ClusteringAlgorithm::hca}) {
    const auto c = run_clustering(algo, one, 600, 120, 1);
    REQUIRE(c.size() == 1);
    CHECK(distance(c.clusters[0].head, {100, 100}) < 1e-9);
  }
  CHECK(cluster_hca(make_field({{100, 100}, {900, 100}}), 600, 2).size() == 1);
  CHECK(cluster_hca(make_field({{100, 100}, {1400, 100}}), 600, 2).size() == 2);
  CHECK(cluster_hca(make_field({{100, 100}, {900, 100}}), 600, 1).size() == 2);
}

TEST_CASE("clusterings of random fields satisfy both limits") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto f = generate_field({0, 0, 3000, 3000}, 600, {1500, 1500}, seed);
    for (auto algo : {ClusteringAlgorithm::algo1, ClusteringAlgorithm::kmeans_rerun, ClusteringAlgorithm::hca}) {
      CAPTURE(seed);
      CAPTURE(to_string(algo));
      const auto c = run_clustering(algo, f, 500, 60, seed);
      CHECK(validate_clustering(c, f, 500, 60).empty());
      CHECK(c.unassigned.empty());
      CHECK(c.size() >= 10);  // ceil(600 / 60)
      std::set<int> seen;
      for (const auto& cl : c.clusters) seen.insert(cl.members.begin(), cl.members.end());
      CHECK(seen.size() == 600);
    }
  }
}

TEST_CASE("algo1 is deterministic for a seed and the literal mode agrees on limits") {
  const auto f = generate_field({0, 0, 3000, 3000}, 500, {1500, 1500}, 21);
  const auto a = cluster_constrained_kmeans(f, 500, 60, 5);
  const auto b = cluster_constrained_kmeans(f, 500, 60, 5);
  CHECK(clustering_to_json(a) == clustering_to_json(b));
  ConstrainedKMeansOptions literal;
  literal.warm_start = false;
  const auto l = cluster_constrained_kmeans(f, 500, 60, 5, literal);
  CHECK(validate_clustering(l, f, 500, 60).empty());
}

TEST_CASE("infeasible k range reports the stranded SNs") {
  const auto f = generate_field({0, 0, 3000, 3000}, 200, {1500, 1500}, 2);
  ConstrainedKMeansOptions opt;
  opt.max_clusters = 2;
  CHECK_THROWS_AS(cluster_constrained_kmeans(f, 300, 120, 1, opt), Infeasible);
}

TEST_CASE("shift toward the dock") {
  const double range = 600.0;
  SUBCASE("member already at the range limit on the far side: no displacement") {
    const auto f = make_field({{1000, 1000}, {400, 1000}});
    Clustering c;
    c.clusters.push_back({{1000, 1000}, {0, 1}});  // SN 1 sits 600 m west of the CH
    const auto s = shift_toward_dock(c, f, {2500, 1000}, range);
    CHECK(distance(s.clusters[0].head, {1000, 1000}) < 1e-9);
  }
  SUBCASE("single member: slack equals the range minus the margin") {
    const auto f = make_field({{1000, 1000}});
    Clustering c;
    c.clusters.push_back({{1000, 1000}, {0}});
    const Point dock{2500, 1900};
    const auto s = shift_toward_dock(c, f, dock, range);
    // Brute-force line search in 1 mm steps along the ray to the dock.
    double best = 0.0;
    const double len = distance({1000, 1000}, dock);
    for (double t = 0.0; t <= len; t += 0.001) {
      const Point p = step_toward({1000, 1000}, dock, t);
      if (distance(p, {1000, 1000}) <= range - 0.1) best = t;
    }
    CHECK(distance(s.clusters[0].head, {1000, 1000}) == doctest::Approx(best).epsilon(0.02 / best));
    CHECK(distance(s.clusters[0].head, {1000, 1000}) <= range - 0.1 + 1e-9);
  }
  SUBCASE("single member near the dock moves all the way") {
    const auto f = make_field({{2400, 2500}});
    Clustering c;
    c.clusters.push_back({{2400, 2500}, {0}});
    const auto s = shift_toward_dock(c, f, {2500, 2500}, range);
    CHECK(distance(s.clusters[0].head, {2500, 2500}) < 0.02);
  }
  SUBCASE("random instances: closer to the dock and still valid") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto f = generate_field({0, 0, 4000, 4000}, 700, {2000, 2000}, seed);
      const auto c = cluster_constrained_kmeans(f, 500, 80, seed);
      const auto s = shift_toward_dock(c, f, f.dock, 500);
      CHECK(sum_dock_distance(s, f.dock) < sum_dock_distance(c, f.dock));
      for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(distance(s.clusters[k].head, f.dock) <= distance(c.clusters[k].head, f.dock) + 1e-9);
        CHECK(s.clusters[k].members == c.clusters[k].members);
      }
      CHECK(validate_clustering(s, f, 500, 80).empty());
    }
  }
}

TEST_CASE("validate_clustering flags each kind of violation") {
  std::vector<Point> pts;
  for (int i = 0; i < 4; ++i) pts.push_back({1000.0 + i, 1000.0});
  pts.push_back({1601.0, 1000.0});
  const auto f = make_field(pts);

  Clustering over;
  over.clusters.push_back({{1000, 1000}, {0, 1, 2, 3}});
  over.clusters.push_back({{1601, 1000}, {4}});
  const auto cap = validate_clustering(over, f, 600, 3);
  REQUIRE(cap.size() == 1);
  CHECK(cap[0].kind == ClusteringViolation::Kind::capacity);

  Clustering far;
  far.clusters.push_back({{1000, 1000}, {0, 1, 2, 3, 4}});  // SN 4 is 601 m away
  const auto rad = validate_clustering(far, f, 600, 10);
  REQUIRE(rad.size() == 1);
  CHECK(rad[0].kind == ClusteringViolation::Kind::radius);
  CHECK(rad[0].node == 4);

  Clustering dup = over;
  dup.clusters[1].members = {3, 4};
  bool has_dup = false;
  for (const auto& v : validate_clustering(dup, f, 600, 10)) has_dup |= v.kind == ClusteringViolation::Kind::duplicate;
  CHECK(has_dup);

  Clustering miss = over;
  miss.clusters[1].members.clear();
  bool has_missing = false;
  for (const auto& v : validate_clustering(miss, f, 600, 10)) has_missing |= v.kind == ClusteringViolation::Kind::missing;
  CHECK(has_missing);
}

TEST_CASE("clustering JSON round trip") {
  const auto f = generate_field({0, 0, 2000, 2000}, 300, {1000, 1000}, 5);
  const auto c = cluster_constrained_kmeans(f, 500, 50, 2);
  const auto back = clustering_from_json(clustering_to_json(c));
  REQUIRE(back.size() == c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(back.clusters[k].head == c.clusters[k].head);
    CHECK(back.clusters[k].members == c.clusters[k].members);
  }
}
