#include <sstream>

#include <doctest.h>

#include "uavdc/config.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/scenario.hpp"

using namespace uavdc;

namespace {
const Rect kArea{0, 0, 5000, 5000};

std::string replace_line(const std::string& text, const std::string& prefix, const std::string& line) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string l;
  while (std::getline(in, l)) out << (l.rfind(prefix, 0) == 0 ? line : l) << '\n';
  return out.str();
}
}  // namespace

TEST_CASE("generate_field places every node inside the area") {
  const auto f = generate_field(kArea, 2000, {0, 0}, 7);
  CHECK(f.size() == 2000);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.nodes[i].id == static_cast<int>(i));
    CHECK(kArea.contains(f.nodes[i].pos));
  }
  CHECK_NOTHROW(f.validate());
}

TEST_CASE("generate_field is uniform enough to fill every quadrant evenly") {
  const auto f = generate_field(kArea, 4000, {0, 0}, 3);
  int q[4] = {0, 0, 0, 0};
  for (const auto& n : f.nodes) q[(n.pos.x > 2500 ? 1 : 0) + (n.pos.y > 2500 ? 2 : 0)]++;
  for (int c : q) CHECK(std::abs(c - 1000) < 150);
}

TEST_CASE("generate_field degenerate and deterministic cases") {
  const auto one = generate_field({10, 20, 30, 40}, 1, {15, 25}, 99);
  CHECK(one.size() == 1);
  CHECK(generate_field(kArea, 500, {1, 1}, 5) == generate_field(kArea, 500, {1, 1}, 5));
  CHECK_FALSE(generate_field(kArea, 500, {1, 1}, 5) == generate_field(kArea, 500, {1, 1}, 6));
  CHECK_THROWS_AS(generate_field({0, 0, 0, 10}, 5, {0, 0}, 1), InvalidInput);
  CHECK_THROWS_AS(generate_field(kArea, 0, {0, 0}, 1), InvalidInput);
  CHECK_THROWS_AS(generate_field(kArea, 5, {6000, 0}, 1), InvalidInput);
}

TEST_CASE("field files round-trip exactly") {
  const auto f = generate_field(kArea, 2000, {2500, 2500}, 11);
  std::stringstream ss;
  write_field(ss, f);
  CHECK(read_field(ss) == f);
}

TEST_CASE("malformed field files raise parse errors") {
  const auto f = generate_field({0, 0, 100, 100}, 3, {50, 50}, 1);
  std::stringstream ss;
  write_field(ss, f);
  const std::string good = ss.str();

  SUBCASE("node outside the area") {
    std::istringstream in(replace_line(good, "1 ", "1 150.000 20.000"));
    CHECK_THROWS_AS(read_field(in), ParseError);
  }
  SUBCASE("empty node list") {
    std::string text = good.substr(0, good.find("nodes:") + 7);
    text = replace_line(text, "count:", "count: 1");
    std::istringstream in(text);
    CHECK_THROWS_AS(read_field(in), ParseError);
  }
  SUBCASE("error names the line") {
    std::istringstream in(replace_line(good, "dock:", "dock: 1 2 3"));
    try {
      read_field(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
      CHECK(std::string(e.what()).find("dock") != std::string::npos);
    }
  }
}

TEST_CASE("mission config validation and round trip") {
  MissionConfig cfg;
  CHECK(cfg.mission_slots() == 2400);
  CHECK(cfg.deadline_slots(0) == 1400);
  cfg.deadline_overrides[3] = 20.0;
  CHECK(cfg.deadline_slots(3) == 200);
  CHECK(config_from_json(to_json(cfg)).deadline_slots(3) == 200);
  CHECK(fingerprint(config_from_json(to_json(cfg))) == fingerprint(cfg));
  CHECK(fingerprint(cfg) != fingerprint(MissionConfig{}));

  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"no_such_key", 1}}), InvalidInput);
  MissionConfig bad;
  bad.cruise_speed = 40.0;  // above max_speed
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = MissionConfig{};
  bad.mission_time_s = 240.05;  // not a whole number of slots
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = MissionConfig{};
  bad.max_members = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}
