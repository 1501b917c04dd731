#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavdc/geometry.hpp"
#include "uavdc/scenario.hpp"

namespace uavdc {

struct Cluster {
  Point head;
  std::vector<int> members;  // SN ids, ascending
};

struct Clustering {
  std::vector<Cluster> clusters;
  std::vector<int> unassigned;

  std::size_t size() const { return clusters.size(); }
};

enum class ClusteringAlgorithm { algo1, kmeans_rerun, hca };

/// Where the k initial CHs of a k-means style run are placed.
enum class SeedPlacement {
  uniform_area,  // i.i.d. uniform over the field rectangle
  random_nodes,  // k distinct SN positions drawn without replacement
  kmeanspp,      // D^2-weighted sampling over SN positions
};

const char* to_string(ClusteringAlgorithm a);
ClusteringAlgorithm clustering_algorithm_from_string(const std::string& s);

struct ConstrainedKMeansOptions {
  int max_clusters = 0;           // 0 means one CH per SN
  int max_inner_iterations = 300;
  double tolerance_m = 1e-6;      // total centroid displacement that counts as converged
  bool shuffle_order = false;     // seeded SN order instead of ascending ids
  SeedPlacement seeding = SeedPlacement::uniform_area;
  /// Stranded SNs (in range of no CH with room) add their position to the
  /// mean of their nearest CH. Off gives the members-only centroid update,
  /// which leaves coverage holes that no head ever moves toward.
  bool stranded_pull = false;
  /// After a failed k, start k + 1 from the settled heads plus one head on a
  /// stranded SN instead of a fresh random layout.
  bool warm_start = true;
};

/// Capacity- and radius-constrained k-means. Tries k = ceil(M / F) upward and
/// returns the first k whose assignment leaves no SN unassigned.
/// Throws Infeasible when no k up to the limit works.
Clustering cluster_constrained_kmeans(const SensorField& field, double range_m, int max_members,
                                      std::uint64_t seed, const ConstrainedKMeansOptions& opt = {});

/// Plain Lloyd k-means, rerun with k + 1 until every cluster meets both limits.
Clustering cluster_kmeans_rerun(const SensorField& field, double range_m, int max_members,
                                std::uint64_t seed, int max_clusters = 0,
                                SeedPlacement seeding = SeedPlacement::uniform_area);

/// Complete-linkage agglomerative clustering that only performs merges whose
/// result keeps all members within `range_m` of the centroid and at most
/// `max_members` SNs.
Clustering cluster_hca(const SensorField& field, double range_m, int max_members);

Clustering run_clustering(ClusteringAlgorithm algo, const SensorField& field, double range_m,
                          int max_members, std::uint64_t seed);

struct ShiftOptions {
  double margin_m = 0.1;
  double tolerance_m = 0.01;
};

/// Pulls every CH along the straight line toward the dock as far as it can go
/// while its farthest member stays within range_m - margin. Memberships are
/// left untouched.
Clustering shift_toward_dock(const Clustering& clustering, const SensorField& field, Point dock,
                             double range_m, const ShiftOptions& opt = {});

struct ClusteringViolation {
  enum class Kind { capacity, radius, duplicate, missing, unknown_node };
  Kind kind;
  int cluster = -1;
  int node = -1;
  double value = 0.0;  // member count or distance

  std::string describe() const;
};

std::vector<ClusteringViolation> validate_clustering(const Clustering& c, const SensorField& field,
                                                     double range_m, int max_members);

nlohmann::json clustering_to_json(const Clustering& c);
Clustering clustering_from_json(const nlohmann::json& j);

}  // namespace uavdc
