#pragma once

#include "uavdc/geometry.hpp"

namespace uavdc {

/// Air-to-ground channel constants. `a` and `b` are the environment-dependent
/// sigmoid coefficients of the LoS probability model.
struct AtgChannelParams {
  double a = 9.61;
  double b = 0.16;              // 1/degree
  double carrier_hz = 2e9;
  double light_speed = 3e8;     // m/s
  double excess_los_db = 1.0;
  double excess_nlos_db = 20.0;

  void validate() const;
};

/// CH-to-UAV uplink parameters.
struct RadioParams {
  double bandwidth_hz = 10e6;
  double noise_dbm = -109.0;
  double ch_tx_dbm = 0.0;
  double packet_bits = 8192.0;  // 1 Kbyte
  double packets_per_ch = 50000.0;

  void validate() const;
};

struct LinkBudget {
  double elevation_deg = 0.0;
  double los_probability = 0.0;
  double path_loss_db = 0.0;
  double rx_power_dbm = 0.0;
  double snr_linear = 0.0;
  double rate_bps = 0.0;
};

/// How the number of upload slots is counted. `per_packet` rounds every packet
/// up to whole slots; `batch` rounds the total payload once.
enum class CollectionMode { per_packet, batch };

/// SN-to-CH range test; the boundary is inclusive.
bool range_ok(double sn_ch_distance_m, double range_m);

/// Elevation angle of a UAV at altitude `altitude_m`, seen from a ground node
/// `ground_dist_m` away horizontally.
double elevation_deg(double ground_dist_m, double altitude_m);

/// Sigmoid LoS probability 1 / (1 + a exp(-b (theta - a))).
double los_probability(double theta_deg, const AtgChannelParams& p);

/// Free-space loss 20 log10(4 pi f d / c) plus the excess loss, in dB.
double free_space_loss_db(double distance_m, double excess_db, const AtgChannelParams& p);

/// Mean (LoS/NLoS-weighted) path loss between a CH and a UAV hovering at
/// `hover_pos`, `altitude_m` above ground.
double mean_path_loss(Point ch_pos, Point hover_pos, double altitude_m, const AtgChannelParams& p);

LinkBudget uplink_rate(Point ch_pos, Point hover_pos, double altitude_m, const RadioParams& radio,
                       const AtgChannelParams& atg);

/// Slots needed to upload one CH's payload at `rate_bps`.
/// Throws InfeasibleLink for a non-positive rate.
long long collection_slots(double rate_bps, const RadioParams& radio, double slot_s,
                           CollectionMode mode);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

}  // namespace uavdc
