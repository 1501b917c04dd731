#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uavdc/geometry.hpp"

namespace uavdc {

struct SensorNode {
  int id = 0;
  Point pos;

  friend bool operator==(const SensorNode&, const SensorNode&) = default;
};

struct SensorField {
  std::vector<SensorNode> nodes;
  Point dock;
  Rect area;
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64/u53";

  std::size_t size() const { return nodes.size(); }
  /// Throws InvalidInput when ids are not 0..M-1 in order, a node or the dock
  /// lies outside the area, or the field is empty.
  void validate() const;

  friend bool operator==(const SensorField&, const SensorField&) = default;
};

/// Uniform i.i.d. placement of `count` nodes, coordinates quantized to
/// millimetres so the field survives a save/load round trip exactly.
SensorField generate_field(Rect area, int count, Point dock, std::uint64_t seed);

void write_field(std::ostream& out, const SensorField& field);
SensorField read_field(std::istream& in);

void save_field(const SensorField& field, const std::string& path);
SensorField load_field(const std::string& path);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <typename Engine>
double unit_uniform(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace uavdc
