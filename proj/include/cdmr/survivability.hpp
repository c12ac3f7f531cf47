#ifndef CDMR_SURVIVABILITY_HPP
#define CDMR_SURVIVABILITY_HPP

#include <utility>
#include <vector>

#include "cdmr/barriers.hpp"
#include "cdmr/geometry.hpp"

namespace cdmr {

struct BatteryState {
  double energy = 0.95;       // E, normalized, in [0, e_chg]
  double e_min = 0.5;         // minimum reserve
  double e_chg = 0.95;        // full-charge level
  double drain_rate = 0.01;   // energy/second while active
  double charge_rate = 0.05;  // energy/second while charging

  void validate() const;
};

struct ChargingStation {
  Vec2 location{0, 0};
  double radius = 0.1;  // d_chg: wireless charging disk
};

/// Scripted obstacle: constant-speed loop over waypoints (a single
/// waypoint is a static obstacle). Exposes position and velocity so the
/// constraint row can carry the motion drift term.
struct Obstacle {
  std::vector<Vec2> waypoints;
  double speed = 0.0;
  double clearance = 0.2;  // d_o

  Vec2 position(double t) const;
  Vec2 velocity(double t) const;
};

/// h_e = E - E_min - k * max(|x_c - x| - d_chg, 0)^2. The max(.,0) clamp
/// makes the station term vanish inside the charging disk, so h_e is
/// monotone in the station distance.
double energy_barrier(const Vec2& x, const BatteryState& battery,
                      const ChargingStation& station, double k);

/// Hard row enforcing hdot_e >= -alpha(h_e) with
/// dh_e/dx = -2k max(r-d_chg,0) (x-x_c)^T / r and the battery rate
/// (signed: negative while draining) entering as drift.
ConstraintRow energy_constraint_row(const Vec2& x, const BatteryState& battery,
                                    const ChargingStation& station, double k,
                                    const ClassKappa& alpha,
                                    double energy_rate);

BarrierSpec energy_barrier_spec(const Vec2& x, const BatteryState& battery,
                                const ChargingStation& station, double k,
                                const ClassKappa& alpha, double energy_rate);

/// h_o = |x - x_o|^2 - d_o^2; hard row 2(x-x_o)^T u >= -alpha(h_o) - drift
/// with drift = -2(x-x_o)^T xdot_o. A robot exactly on the obstacle (zero
/// gradient, h_o < 0) gets a deterministic unit kick along +x.
ConstraintRow obstacle_constraint_row(const Vec2& x, const Obstacle& obstacle,
                                      double t, const ClassKappa& alpha);

BarrierSpec obstacle_barrier_spec(const Vec2& x, const Obstacle& obstacle,
                                  double t, const ClassKappa& alpha);

/// Linear battery dynamics with clamping; returns the new state and a
/// depleted flag raised when the energy hits zero (the run continues).
std::pair<BatteryState, bool> battery_step(BatteryState battery, bool charging,
                                           double dt);

}  // namespace cdmr

#endif  // CDMR_SURVIVABILITY_HPP
