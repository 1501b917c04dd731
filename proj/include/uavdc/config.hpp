#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "uavdc/channel.hpp"
#include "uavdc/energy.hpp"

namespace uavdc {

/// Global mission parameters. Defaults reproduce the reference scenario
/// (5 x 5 km field, 600 m SN range, 120 SNs per CH, 30 m/s at 100 m).
struct MissionConfig {
  double comm_range_m = 600.0;
  int max_members = 120;
  double altitude_m = 100.0;
  double cruise_speed = 30.0;
  double max_speed = 30.0;
  double safe_distance_m = 10.0;
  double slot_s = 0.1;
  double mission_time_s = 240.0;
  double deadline_s = 140.0;
  std::map<int, double> deadline_overrides;  // CH index -> seconds
  int fleet_max = 24;
  CollectionMode collection = CollectionMode::batch;
  RadioParams radio;
  AtgChannelParams atg;
  EnergyParams energy;
  BatterySpec battery;

  /// N = T_F / delta. Throws InvalidInput unless it is a positive integer.
  long long mission_slots() const;
  /// Deadline of CH `ch` in whole slots, rounded down.
  long long deadline_slots(int ch) const;
  double deadline_for(int ch) const;

  void validate() const;
};

/// Converts seconds to slots, rounding down, tolerant to representation error.
long long seconds_to_slots(double seconds, double slot_s);

nlohmann::json to_json(const MissionConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
MissionConfig config_from_json(const nlohmann::json& j, MissionConfig base = {});
MissionConfig load_config(const std::string& path);

/// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string fingerprint(const MissionConfig& cfg);
std::string fnv1a_hex(const std::string& data);

const char* to_string(CollectionMode m);
CollectionMode collection_mode_from_string(const std::string& s);

}  // namespace uavdc
