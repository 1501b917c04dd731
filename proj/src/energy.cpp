#include "uavdc/energy.hpp"

#include <cmath>
#include <string>

#include "uavdc/errors.hpp"

namespace uavdc {

void EnergyParams::validate() const {
  const double v[] = {blade_power_w, induced_power_w, tip_speed, induced_velocity,
                      drag_ratio,    air_density,     solidity,  disc_area};
  for (double x : v)
    if (!(x > 0.0)) throw InvalidInput("energy: all propulsion parameters must be positive");
}

void BatterySpec::validate() const {
  if (!(capacity_mah > 0.0)) throw InvalidInput("battery: capacity must be positive");
  if (!(voltage_v > 0.0)) throw InvalidInput("battery: voltage must be positive");
  if (!(reserve_fraction >= 0.0 && reserve_fraction < 1.0))
    throw InvalidInput("battery: reserve fraction must lie in [0, 1)");
}

double propulsion_power(double speed, const EnergyParams& p) {
  const double v2 = speed * speed;
  // sqrt(1 + x^2) - x written as 1 / (sqrt(1 + x^2) + x): no cancellation, always > 0.
  const double x = v2 / (2.0 * p.induced_velocity * p.induced_velocity);
  const double radicand = 1.0 / (std::sqrt(1.0 + x * x) + x);
  const double induced = p.induced_power_w * std::sqrt(radicand);
  const double blade = p.blade_power_w * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
  const double parasite =
      0.5 * p.drag_ratio * p.air_density * p.solidity * p.disc_area * v2 * speed;
  return induced + blade + parasite;
}

double hover_power(const EnergyParams& p) { return p.induced_power_w + p.blade_power_w; }

double segment_energy(double speed, double duration_s, const EnergyParams& p) {
  if (speed > 0.0) return propulsion_power(speed, p) * duration_s;
  return hover_power(p) * duration_s;
}

BatteryState battery_drain(BatteryState state, double energy_j, double reserve_j) {
  if (energy_j < 0.0) throw InvalidInput("battery_drain: negative energy");
  BatteryState next{state.joules_remaining - energy_j};
  if (next.joules_remaining < reserve_j) {
    const double deficit = reserve_j - next.joules_remaining;
    throw BatteryViolation(deficit, "battery below reserve by " + std::to_string(deficit) + " J");
  }
  return next;
}

long long flight_slots(double distance_m, double speed, double slot_s) {
  if (distance_m <= 0.0) return 0;
  const double exact = distance_m / (speed * slot_s);
  // Exact multiples (3000 m at 3 m per slot) must not pick up a spurious slot.
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) <= 1e-9 * std::max(1.0, rounded))
    return static_cast<long long>(rounded);
  return static_cast<long long>(std::ceil(exact));
}

double route_energy(std::span<const Point> waypoints, std::span<const long long> dwell_slots,
                    double speed, double slot_s, const EnergyParams& p) {
  if (waypoints.size() < 2) return 0.0;
  if (dwell_slots.size() + 2 != waypoints.size())
    throw InvalidInput("route_energy: dwell list must align with the visited waypoints");
  double total = 0.0;
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const auto fly = flight_slots(distance(waypoints[k - 1], waypoints[k]), speed, slot_s);
    total += segment_energy(speed, static_cast<double>(fly) * slot_s, p);
    if (k < waypoints.size() - 1)
      total += segment_energy(0.0, static_cast<double>(dwell_slots[k - 1]) * slot_s, p);
  }
  return total;
}

}  // namespace uavdc
