#ifndef CDMR_QP_HPP
#define CDMR_QP_HPP

#include <Eigen/Dense>
#include <vector>

#include "cdmr/class_kappa.hpp"
#include "cdmr/errors.hpp"

namespace cdmr {

enum class RowLabel { Task, Energy, Obstacle, Custom };

/// One linear inequality in (u, delta):
///   a_u . u + a_delta * delta >= b.
/// Hard rows have a_delta = 0; the single shared slack enters slackable
/// rows with coefficient +1 (the sign the KKT system and the worked
/// solutions use).
struct ConstraintRow {
  Eigen::VectorXd a_u;
  double a_delta = 0.0;
  double b = 0.0;
  RowLabel label = RowLabel::Custom;

  bool hard() const { return a_delta == 0.0; }
};

/// Minimum-energy problem  min |u|^2 + w*delta^2  s.t. rows.
struct QpProblem {
  int dim_u = 2;
  double slack_weight = 1.0;  // w > 0
  std::vector<ConstraintRow> rows;
};

struct QpSolution {
  Eigen::VectorXd u_star;
  double delta_star = 0.0;
  Eigen::VectorXd lambda;       // one multiplier per row, >= 0
  std::vector<int> active_set;  // row indices, ascending
  double kkt_residual = 0.0;
};

/// Exact solve by active-set enumeration over all row subsets (rows
/// capped at 16). The objective is strictly convex, so any subset whose
/// equality-constrained solution satisfies primal feasibility and dual
/// nonnegativity is the global minimizer; ties are broken by smallest
/// active-set cardinality, then lowest row indices. Throws Infeasible
/// when enumeration exhausts all subsets, NumericallyIllConditioned when
/// the only candidates had normal-matrix condition beyond 1e12.
QpSolution solve(const QpProblem& problem);

/// Closed-form optimum of the one-row task problem (w = 1):
///   u* = alpha(-J) * gradJ^T / (1 + |gradJ|^2).
Eigen::VectorXd solve_single_closed_form(const Eigen::VectorXd& grad_j,
                                         double j_value,
                                         const ClassKappa& alpha);

/// Max of primal feasibility violation, dual negativity, complementary
/// slackness violation and stationarity norm for a candidate solution.
double kkt_residual(const QpProblem& problem, const QpSolution& candidate);

}  // namespace cdmr

#endif  // CDMR_QP_HPP
