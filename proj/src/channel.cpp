#include "uavdc/channel.hpp"

#include <cmath>
#include <numbers>

#include "uavdc/errors.hpp"

namespace uavdc {

void AtgChannelParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("atg: a and b must be positive");
  if (!(carrier_hz > 0.0) || !(light_speed > 0.0))
    throw InvalidInput("atg: carrier frequency and propagation speed must be positive");
  if (!(excess_los_db >= 0.0) || !(excess_nlos_db >= excess_los_db))
    throw InvalidInput("atg: need 0 <= excess_los_db <= excess_nlos_db");
}

void RadioParams::validate() const {
  if (!(bandwidth_hz > 0.0)) throw InvalidInput("radio: bandwidth must be positive");
  if (!(packet_bits > 0.0)) throw InvalidInput("radio: packet size must be positive");
  if (!(packets_per_ch >= 0.0)) throw InvalidInput("radio: packet count must be non-negative");
}

bool range_ok(double sn_ch_distance_m, double range_m) { return sn_ch_distance_m <= range_m; }

double elevation_deg(double ground_dist_m, double altitude_m) {
  const double slant = std::hypot(ground_dist_m, altitude_m);
  return 180.0 / std::numbers::pi * std::asin(altitude_m / slant);
}

double los_probability(double theta_deg, const AtgChannelParams& p) {
  return 1.0 / (1.0 + p.a * std::exp(-p.b * (theta_deg - p.a)));
}

double free_space_loss_db(double distance_m, double excess_db, const AtgChannelParams& p) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * p.carrier_hz / p.light_speed) +
         20.0 * std::log10(distance_m) + excess_db;
}

double mean_path_loss(Point ch_pos, Point hover_pos, double altitude_m, const AtgChannelParams& p) {
  const double ground = distance(ch_pos, hover_pos);
  const double slant = std::hypot(ground, altitude_m);
  const double pr = los_probability(elevation_deg(ground, altitude_m), p);
  const double los = free_space_loss_db(slant, p.excess_los_db, p);
  const double nlos = free_space_loss_db(slant, p.excess_nlos_db, p);
  return pr * los + (1.0 - pr) * nlos;
}

LinkBudget uplink_rate(Point ch_pos, Point hover_pos, double altitude_m, const RadioParams& radio,
                       const AtgChannelParams& atg) {
  LinkBudget lb;
  const double ground = distance(ch_pos, hover_pos);
  lb.elevation_deg = elevation_deg(ground, altitude_m);
  lb.los_probability = los_probability(lb.elevation_deg, atg);
  lb.path_loss_db = mean_path_loss(ch_pos, hover_pos, altitude_m, atg);
  lb.rx_power_dbm = radio.ch_tx_dbm - lb.path_loss_db;
  // Received and noise power both in dBm, so their difference is the SNR in dB.
  lb.snr_linear = std::pow(10.0, (lb.rx_power_dbm - radio.noise_dbm) / 10.0);
  lb.rate_bps = radio.bandwidth_hz * std::log2(1.0 + lb.snr_linear);
  return lb;
}

long long collection_slots(double rate_bps, const RadioParams& radio, double slot_s,
                           CollectionMode mode) {
  if (!(rate_bps > 0.0)) throw InfeasibleLink("collection_slots: link rate is zero");
  if (!(slot_s > 0.0)) throw InvalidInput("collection_slots: slot length must be positive");
  if (radio.packets_per_ch == 0.0) return 0;
  const double bits_per_slot = rate_bps * slot_s;
  if (mode == CollectionMode::per_packet) {
    const auto per_packet = static_cast<long long>(std::ceil(radio.packet_bits / bits_per_slot));
    return static_cast<long long>(radio.packets_per_ch) * per_packet;
  }
  return static_cast<long long>(
      std::ceil(radio.packets_per_ch * radio.packet_bits / bits_per_slot));
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace uavdc
