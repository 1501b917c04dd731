#include "uavdc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

constexpr const char* kFormat = "uavdc-scenario";
constexpr int kVersion = 1;

double quantize_mm(double v) { return std::round(v * 1000.0) / 1000.0; }

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void SensorField::validate() const {
  if (!(area.width() > 0.0) || !(area.height() > 0.0))
    throw InvalidInput("field: area must have positive width and height");
  if (nodes.empty()) throw InvalidInput("field: node list is empty");
  if (!area.contains(dock)) throw InvalidInput("field: dock lies outside the area");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != static_cast<int>(i))
      throw InvalidInput("field: node ids must be contiguous from 0 (got " +
                         std::to_string(nodes[i].id) + " at position " + std::to_string(i) + ")");
    if (!area.contains(nodes[i].pos))
      throw InvalidInput("field: node " + std::to_string(i) + " lies outside the area");
  }
}

SensorField generate_field(Rect area, int count, Point dock, std::uint64_t seed) {
  if (!(area.width() > 0.0) || !(area.height() > 0.0))
    throw InvalidInput("generate_field: area must have positive width and height");
  if (count < 1) throw InvalidInput("generate_field: need at least one node");
  if (!area.contains(dock)) throw InvalidInput("generate_field: dock lies outside the area");

  SensorField f;
  f.area = area;
  f.dock = dock;
  f.seed = seed;
  f.nodes.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const double x = quantize_mm(area.x0 + unit_uniform(rng) * area.width());
    const double y = quantize_mm(area.y0 + unit_uniform(rng) * area.height());
    // Rounding can push a coordinate a hair past the far edge.
    f.nodes.push_back({i, {std::min(x, area.x1), std::min(y, area.y1)}});
  }
  return f;
}

void write_field(std::ostream& out, const SensorField& f) {
  out << "format: " << kFormat << "\n";
  out << "version: " << kVersion << "\n";
  out << "units: m\n";
  out << "generator: " << f.generator << "\n";
  out << "seed: " << f.seed << "\n";
  out << "area: " << fmt3(f.area.x0) << ' ' << fmt3(f.area.y0) << ' ' << fmt3(f.area.x1) << ' '
      << fmt3(f.area.y1) << "\n";
  out << "dock: " << fmt3(f.dock.x) << ' ' << fmt3(f.dock.y) << "\n";
  out << "count: " << f.nodes.size() << "\n";
  out << "nodes:\n";
  for (const auto& n : f.nodes) out << n.id << ' ' << fmt3(n.pos.x) << ' ' << fmt3(n.pos.y) << "\n";
}

SensorField read_field(std::istream& in) {
  SensorField f;
  std::string line;
  int lineno = 0;
  bool have_format = false, have_area = false, have_dock = false, have_count = false;
  long long count = -1;

  auto need_numbers = [&](const std::string& field, const std::string& rest, int n) {
    std::istringstream ss(rest);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v)
      if (!(ss >> x)) throw ParseError(lineno, "field '" + field + "' needs " + std::to_string(n) + " numbers");
    std::string extra;
    if (ss >> extra) throw ParseError(lineno, "trailing data in field '" + field + "'");
    return v;
  };

  // Header block: "key: value" lines until "nodes:".
  bool in_nodes = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "expected 'key: value'");
    const std::string key = trim(t.substr(0, colon));
    const std::string val = trim(t.substr(colon + 1));
    if (key == "format") {
      if (val != kFormat) throw ParseError(lineno, "field 'format': expected " + std::string(kFormat));
      have_format = true;
    } else if (key == "version") {
      if (val != std::to_string(kVersion))
        throw ParseError(lineno, "field 'version': unsupported version '" + val + "'");
    } else if (key == "units") {
      if (val != "m") throw ParseError(lineno, "field 'units': only meters ('m') are supported");
    } else if (key == "generator") {
      f.generator = val;
    } else if (key == "seed") {
      try {
        std::size_t used = 0;
        f.seed = std::stoull(val, &used);
        if (used != val.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(lineno, "field 'seed': not an unsigned integer");
      }
    } else if (key == "area") {
      const auto v = need_numbers("area", val, 4);
      f.area = {v[0], v[1], v[2], v[3]};
      if (!(f.area.width() > 0.0) || !(f.area.height() > 0.0))
        throw ParseError(lineno, "field 'area': non-positive side");
      have_area = true;
    } else if (key == "dock") {
      const auto v = need_numbers("dock", val, 2);
      f.dock = {v[0], v[1]};
      have_dock = true;
    } else if (key == "count") {
      const auto v = need_numbers("count", val, 1);
      count = static_cast<long long>(v[0]);
      if (count < 1 || static_cast<double>(count) != v[0])
        throw ParseError(lineno, "field 'count': must be a positive integer");
      have_count = true;
    } else if (key == "nodes") {
      in_nodes = true;
      break;
    } else {
      throw ParseError(lineno, "unknown field '" + key + "'");
    }
  }
  if (!have_format) throw ParseError(lineno, "missing field 'format'");
  if (!have_area) throw ParseError(lineno, "missing field 'area'");
  if (!have_dock) throw ParseError(lineno, "missing field 'dock'");
  if (!have_count) throw ParseError(lineno, "missing field 'count'");
  if (!in_nodes) throw ParseError(lineno, "missing 'nodes:' block");
  if (!f.area.contains(f.dock)) throw ParseError(lineno, "field 'dock': outside the area");

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    SensorNode n;
    if (!(ss >> n.id >> n.pos.x >> n.pos.y)) throw ParseError(lineno, "node: expected 'id x y'");
    std::string extra;
    if (ss >> extra) throw ParseError(lineno, "node: trailing data");
    if (n.id != static_cast<int>(f.nodes.size()))
      throw ParseError(lineno, "node: id " + std::to_string(n.id) + " out of sequence");
    if (!f.area.contains(n.pos))
      throw ParseError(lineno, "node " + std::to_string(n.id) + ": position outside the area");
    f.nodes.push_back(n);
  }
  if (f.nodes.empty()) throw ParseError(lineno, "node list is empty");
  if (static_cast<long long>(f.nodes.size()) != count)
    throw ParseError(lineno, "field 'count': header says " + std::to_string(count) + ", found " +
                                 std::to_string(f.nodes.size()));
  return f;
}

void save_field(const SensorField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  write_field(out, field);
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

SensorField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_field(in);
}

}  // namespace uavdc
