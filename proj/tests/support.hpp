#pragma once

#include <random>
#include <vector>

#include "uavdc/config.hpp"
#include "uavdc/geometry.hpp"

namespace uavdc::test {

/// Heads placed uniformly in a square of side `side_m` around the dock.
inline std::vector<Point> random_heads(std::mt19937_64& rng, int k, Point dock, double side_m) {
  std::uniform_real_distribution<double> u(-0.5 * side_m, 0.5 * side_m);
  std::vector<Point> heads;
  for (int i = 0; i < k; ++i) heads.push_back({dock.x + u(rng), dock.y + u(rng)});
  return heads;
}

/// Config with horizon and deadlines so loose that only the battery binds.
inline MissionConfig loose_config() {
  MissionConfig cfg;
  cfg.mission_time_s = 100000.0;
  cfg.deadline_s = 100000.0;
  return cfg;
}

}  // namespace uavdc::test
