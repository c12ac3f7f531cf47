#include "cdmr/survivability.hpp"

#include <algorithm>
#include <cmath>

namespace cdmr {

void BatteryState::validate() const {
  if (!(0.0 <= e_min && e_min < e_chg))
    throw_error(ErrorCode::ValidationError, "battery needs 0 <= e_min < e_chg");
  if (drain_rate <= 0.0 || charge_rate <= 0.0)
    throw_error(ErrorCode::ValidationError, "battery rates must be > 0");
  if (energy < 0.0 || energy > e_chg)
    throw_error(ErrorCode::ValidationError, "battery energy outside [0, e_chg]");
}

Vec2 Obstacle::position(double t) const {
  if (waypoints.empty())
    throw_error(ErrorCode::InvalidArgument, "obstacle needs waypoints");
  if (waypoints.size() == 1 || speed <= 0.0) return waypoints.front();

  const size_t n = waypoints.size();
  std::vector<double> seg(n);
  double total = 0.0;
  for (size_t k = 0; k < n; ++k) {
    seg[k] = (waypoints[(k + 1) % n] - waypoints[k]).norm();
    total += seg[k];
  }
  if (total <= 0.0) return waypoints.front();
  double s = std::fmod(speed * t, total);
  if (s < 0.0) s += total;
  for (size_t k = 0; k < n; ++k) {
    if (s <= seg[k] || k == n - 1) {
      const Vec2 dir = (waypoints[(k + 1) % n] - waypoints[k]) / seg[k];
      return waypoints[k] + std::min(s, seg[k]) * dir;
    }
    s -= seg[k];
  }
  return waypoints.front();
}

Vec2 Obstacle::velocity(double t) const {
  if (waypoints.size() <= 1 || speed <= 0.0) return {0, 0};
  const size_t n = waypoints.size();
  std::vector<double> seg(n);
  double total = 0.0;
  for (size_t k = 0; k < n; ++k) {
    seg[k] = (waypoints[(k + 1) % n] - waypoints[k]).norm();
    total += seg[k];
  }
  if (total <= 0.0) return {0, 0};
  double s = std::fmod(speed * t, total);
  if (s < 0.0) s += total;
  for (size_t k = 0; k < n; ++k) {
    if (s <= seg[k] || k == n - 1) {
      const Vec2 dir = (waypoints[(k + 1) % n] - waypoints[k]) / seg[k];
      return speed * dir;
    }
    s -= seg[k];
  }
  return {0, 0};
}

double energy_barrier(const Vec2& x, const BatteryState& battery,
                      const ChargingStation& station, double k) {
  if (k <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "energy barrier gain k must be > 0");
  const double excess = std::max((station.location - x).norm() - station.radius, 0.0);
  return battery.energy - battery.e_min - k * excess * excess;
}

BarrierSpec energy_barrier_spec(const Vec2& x, const BatteryState& battery,
                                const ChargingStation& station, double k,
                                const ClassKappa& alpha, double energy_rate) {
  BarrierSpec spec;
  spec.h = energy_barrier(x, battery, station, k);
  const double r = (x - station.location).norm();
  const double excess = std::max(r - station.radius, 0.0);
  if (excess > 0.0 && r > 0.0)
    spec.grad_h_u = -2.0 * k * excess / r * (x - station.location);
  else
    spec.grad_h_u = Eigen::Vector2d::Zero();  // flat inside the disk
  spec.drift = energy_rate;  // dh_e/dE = 1
  spec.alpha = alpha;
  spec.slackable = false;
  spec.label = RowLabel::Energy;
  return spec;
}

ConstraintRow energy_constraint_row(const Vec2& x, const BatteryState& battery,
                                    const ChargingStation& station, double k,
                                    const ClassKappa& alpha,
                                    double energy_rate) {
  return cbf_row(energy_barrier_spec(x, battery, station, k, alpha, energy_rate));
}

BarrierSpec obstacle_barrier_spec(const Vec2& x, const Obstacle& obstacle,
                                  double t, const ClassKappa& alpha) {
  const Vec2 xo = obstacle.position(t);
  const Vec2 vo = obstacle.velocity(t);
  Vec2 diff = x - xo;
  if (diff.norm() < 1e-12) {
    // coincident robot/obstacle: zero gradient with h < 0 would make the
    // row unsatisfiable; deterministic unit kick along +x (measure-zero,
    // logged by the engine when hit)
    diff = Vec2{1.0, 0.0};
  }
  BarrierSpec spec;
  spec.h = (x - xo).squaredNorm() -
           obstacle.clearance * obstacle.clearance;
  spec.grad_h_u = 2.0 * diff;
  spec.drift = -2.0 * diff.dot(vo);
  spec.alpha = alpha;
  spec.slackable = false;
  spec.label = RowLabel::Obstacle;
  return spec;
}

ConstraintRow obstacle_constraint_row(const Vec2& x, const Obstacle& obstacle,
                                      double t, const ClassKappa& alpha) {
  return cbf_row(obstacle_barrier_spec(x, obstacle, t, alpha));
}

std::pair<BatteryState, bool> battery_step(BatteryState battery, bool charging,
                                           double dt) {
  if (dt <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "battery step needs dt > 0");
  const double rate = charging ? battery.charge_rate : -battery.drain_rate;
  battery.energy = std::clamp(battery.energy + rate * dt, 0.0, battery.e_chg);
  return {battery, battery.energy <= 0.0};
}

}  // namespace cdmr
