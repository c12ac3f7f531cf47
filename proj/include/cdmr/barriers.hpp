#ifndef CDMR_BARRIERS_HPP
#define CDMR_BARRIERS_HPP

#include <Eigen/Dense>

#include "cdmr/class_kappa.hpp"
#include "cdmr/qp.hpp"

namespace cdmr {

/// Barrier function data for one constraint row: h with safe set
/// {h >= 0}, the coefficients grad_h_u mapping the input into hdot, and
/// the input-independent hdot contribution (drift).
struct BarrierSpec {
  double h = 0.0;
  Eigen::VectorXd grad_h_u;
  double drift = 0.0;
  ClassKappa alpha;
  bool slackable = false;
  RowLabel label = RowLabel::Custom;
};

/// The one place row sign conventions are fixed:
///   grad_h_u . u + [slackable] * delta >= -alpha(h) - drift,
/// which enforces hdot >= -alpha(h) (relaxed by delta when slackable).
ConstraintRow cbf_row(const BarrierSpec& spec);

/// Task barrier h = -J_i: slackable row driving the local cost down.
/// Throws NegativeCost for J_i < 0.
BarrierSpec task_barrier(double j_value, const Eigen::VectorXd& grad_j,
                         const ClassKappa& alpha);

/// Finite-time settling bound T <= V0^(1-gamma) / (c (1-gamma)).
double settling_time_bound(double v0, double c, double gamma);

}  // namespace cdmr

#endif  // CDMR_BARRIERS_HPP
