#pragma once

#include <span>

#include "uavdc/geometry.hpp"

namespace uavdc {

/// Rotary-wing propulsion model coefficients. Defaults are the commonly
/// used parameter set for a small quadrotor.
struct EnergyParams {
  double blade_power_w = 79.86;    // profile power at hover
  double induced_power_w = 88.63;  // induced power at hover
  double tip_speed = 120.0;        // m/s
  double induced_velocity = 4.03;  // mean rotor induced velocity at hover, m/s
  double drag_ratio = 0.6;         // fuselage drag ratio
  double air_density = 1.225;      // kg/m^3
  double solidity = 0.05;
  double disc_area = 0.503;        // m^2

  void validate() const;
};

struct BatterySpec {
  double capacity_mah = 3500.0;
  double voltage_v = 11.1;
  double reserve_fraction = 0.1;

  double initial_j() const { return capacity_mah * 1e-3 * voltage_v * 3600.0; }
  double reserve_j() const { return reserve_fraction * initial_j(); }
  /// Energy a UAV may spend on a mission: S(0) - S_min.
  double mission_budget_j() const { return initial_j() - reserve_j(); }

  void validate() const;
};

struct BatteryState {
  double joules_remaining = 0.0;

  friend bool operator==(const BatteryState&, const BatteryState&) = default;
};

double propulsion_power(double speed, const EnergyParams& p);

/// Equals propulsion_power(0, p) exactly.
double hover_power(const EnergyParams& p);

/// Energy over `duration_s` at constant `speed`; zero speed means hovering.
double segment_energy(double speed, double duration_s, const EnergyParams& p);

/// Returns the drained state. Throws BatteryViolation with the deficit when
/// the result falls below `reserve_j`.
BatteryState battery_drain(BatteryState state, double energy_j, double reserve_j);

/// Whole slots to cover `distance_m` at `speed`, rounded up.
long long flight_slots(double distance_m, double speed, double slot_s);

/// Closed-form route energy. `waypoints` holds dock, hover points, dock;
/// `dwell_slots[k]` is the dwell at waypoint k + 1.
double route_energy(std::span<const Point> waypoints, std::span<const long long> dwell_slots,
                    double speed, double slot_s, const EnergyParams& p);

}  // namespace uavdc
