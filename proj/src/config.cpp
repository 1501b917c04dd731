#include "uavdc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "uavdc/errors.hpp"

namespace uavdc {

using nlohmann::json;

long long seconds_to_slots(double seconds, double slot_s) {
  return static_cast<long long>(std::floor(seconds / slot_s + 1e-9));
}

long long MissionConfig::mission_slots() const {
  if (!(slot_s > 0.0)) throw InvalidInput("config: slot length must be positive");
  const double n = mission_time_s / slot_s;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * r)
    throw InvalidInput("config: mission time must be a positive whole number of slots");
  return static_cast<long long>(r);
}

double MissionConfig::deadline_for(int ch) const {
  const auto it = deadline_overrides.find(ch);
  return it == deadline_overrides.end() ? deadline_s : it->second;
}

long long MissionConfig::deadline_slots(int ch) const {
  return seconds_to_slots(deadline_for(ch), slot_s);
}

void MissionConfig::validate() const {
  if (!(comm_range_m > 0.0)) throw InvalidInput("config: comm_range_m must be positive");
  if (max_members < 1) throw InvalidInput("config: max_members must be at least 1");
  if (!(altitude_m > 0.0)) throw InvalidInput("config: altitude_m must be positive");
  if (!(cruise_speed > 0.0)) throw InvalidInput("config: cruise_speed must be positive");
  if (cruise_speed > max_speed) throw InvalidInput("config: cruise_speed exceeds max_speed");
  if (!(safe_distance_m >= 0.0)) throw InvalidInput("config: safe_distance_m must be >= 0");
  mission_slots();
  if (!(deadline_s >= 0.0)) throw InvalidInput("config: deadline_s must be >= 0");
  for (const auto& [ch, d] : deadline_overrides)
    if (ch < 0 || !(d >= 0.0)) throw InvalidInput("config: bad deadline override");
  if (fleet_max < 0) throw InvalidInput("config: fleet_max must be >= 0");
  radio.validate();
  atg.validate();
  energy.validate();
  battery.validate();
}

const char* to_string(CollectionMode m) {
  return m == CollectionMode::batch ? "batch" : "per_packet";
}

CollectionMode collection_mode_from_string(const std::string& s) {
  if (s == "batch") return CollectionMode::batch;
  if (s == "per_packet" || s == "per-packet") return CollectionMode::per_packet;
  throw InvalidInput("unknown collection mode '" + s + "'");
}

json to_json(const MissionConfig& c) {
  json overrides = json::object();
  for (const auto& [ch, d] : c.deadline_overrides) overrides[std::to_string(ch)] = d;
  return json{
      {"comm_range_m", c.comm_range_m},
      {"max_members", c.max_members},
      {"altitude_m", c.altitude_m},
      {"cruise_speed", c.cruise_speed},
      {"max_speed", c.max_speed},
      {"safe_distance_m", c.safe_distance_m},
      {"slot_s", c.slot_s},
      {"mission_time_s", c.mission_time_s},
      {"deadline_s", c.deadline_s},
      {"deadline_overrides", overrides},
      {"fleet_max", c.fleet_max},
      {"collection", to_string(c.collection)},
      {"radio",
       {{"bandwidth_hz", c.radio.bandwidth_hz},
        {"noise_dbm", c.radio.noise_dbm},
        {"ch_tx_dbm", c.radio.ch_tx_dbm},
        {"packet_bits", c.radio.packet_bits},
        {"packets_per_ch", c.radio.packets_per_ch}}},
      {"atg",
       {{"a", c.atg.a},
        {"b", c.atg.b},
        {"carrier_hz", c.atg.carrier_hz},
        {"light_speed", c.atg.light_speed},
        {"excess_los_db", c.atg.excess_los_db},
        {"excess_nlos_db", c.atg.excess_nlos_db}}},
      {"energy",
       {{"blade_power_w", c.energy.blade_power_w},
        {"induced_power_w", c.energy.induced_power_w},
        {"tip_speed", c.energy.tip_speed},
        {"induced_velocity", c.energy.induced_velocity},
        {"drag_ratio", c.energy.drag_ratio},
        {"air_density", c.energy.air_density},
        {"solidity", c.energy.solidity},
        {"disc_area", c.energy.disc_area}}},
      {"battery",
       {{"capacity_mah", c.battery.capacity_mah},
        {"voltage_v", c.battery.voltage_v},
        {"reserve_fraction", c.battery.reserve_fraction}}},
  };
}

namespace {

// Copies j[key] into `out` when present; rejects keys not in `known`.
class Reader {
 public:
  Reader(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j_.is_object()) throw InvalidInput("config: '" + scope_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw InvalidInput("config: bad value for '" + scope_ + key + "': " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) throw InvalidInput("config: unknown key '" + scope_ + k + "'");
  }

 private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

}  // namespace

MissionConfig config_from_json(const json& j, MissionConfig c) {
  Reader r(j, "");
  r.get("comm_range_m", c.comm_range_m);
  r.get("max_members", c.max_members);
  r.get("altitude_m", c.altitude_m);
  r.get("cruise_speed", c.cruise_speed);
  r.get("max_speed", c.max_speed);
  r.get("safe_distance_m", c.safe_distance_m);
  r.get("slot_s", c.slot_s);
  r.get("mission_time_s", c.mission_time_s);
  r.get("deadline_s", c.deadline_s);
  r.get("fleet_max", c.fleet_max);
  if (const json* o = r.sub("deadline_overrides")) {
    if (!o->is_object()) throw InvalidInput("config: deadline_overrides must be an object");
    c.deadline_overrides.clear();
    for (const auto& [k, v] : o->items()) {
      try {
        c.deadline_overrides[std::stoi(k)] = v.get<double>();
      } catch (const std::exception&) {
        throw InvalidInput("config: bad deadline override '" + k + "'");
      }
    }
  }
  std::string mode = to_string(c.collection);
  r.get("collection", mode);
  c.collection = collection_mode_from_string(mode);
  if (const json* s = r.sub("radio")) {
    Reader q(*s, "radio.");
    q.get("bandwidth_hz", c.radio.bandwidth_hz);
    q.get("noise_dbm", c.radio.noise_dbm);
    q.get("ch_tx_dbm", c.radio.ch_tx_dbm);
    q.get("packet_bits", c.radio.packet_bits);
    q.get("packets_per_ch", c.radio.packets_per_ch);
    q.finish();
  }
  if (const json* s = r.sub("atg")) {
    Reader q(*s, "atg.");
    q.get("a", c.atg.a);
    q.get("b", c.atg.b);
    q.get("carrier_hz", c.atg.carrier_hz);
    q.get("light_speed", c.atg.light_speed);
    q.get("excess_los_db", c.atg.excess_los_db);
    q.get("excess_nlos_db", c.atg.excess_nlos_db);
    q.finish();
  }
  if (const json* s = r.sub("energy")) {
    Reader q(*s, "energy.");
    q.get("blade_power_w", c.energy.blade_power_w);
    q.get("induced_power_w", c.energy.induced_power_w);
    q.get("tip_speed", c.energy.tip_speed);
    q.get("induced_velocity", c.energy.induced_velocity);
    q.get("drag_ratio", c.energy.drag_ratio);
    q.get("air_density", c.energy.air_density);
    q.get("solidity", c.energy.solidity);
    q.get("disc_area", c.energy.disc_area);
    q.finish();
  }
  if (const json* s = r.sub("battery")) {
    Reader q(*s, "battery.");
    q.get("capacity_mah", c.battery.capacity_mah);
    q.get("voltage_v", c.battery.voltage_v);
    q.get("reserve_fraction", c.battery.reserve_fraction);
    q.finish();
  }
  r.finish();
  c.validate();
  return c;
}

MissionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(const MissionConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

}  // namespace uavdc
