#include "cdmr/qp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace cdmr {

namespace {

constexpr int kMaxRows = 16;
constexpr double kConditionLimit = 1e12;
constexpr double kResidualLimit = 1e-8;

Eigen::VectorXd stacked_row(const ConstraintRow& row, int dim_z) {
  Eigen::VectorXd a(dim_z);
  a.head(dim_z - 1) = row.a_u;
  a(dim_z - 1) = row.a_delta;
  return a;
}

}  // namespace

QpSolution solve(const QpProblem& problem) {
  const int m = int(problem.rows.size());
  const int du = problem.dim_u;
  if (du < 1)
    throw_error(ErrorCode::InvalidArgument, "dim_u must be >= 1");
  if (problem.slack_weight <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "slack weight must be > 0");
  if (m > kMaxRows)
    throw_error(ErrorCode::InvalidArgument,
                "more than 16 rows; enumeration cap exceeded");
  const int dz = du + 1;

  std::vector<Eigen::VectorXd> rows(m);
  for (int k = 0; k < m; ++k) {
    if (int(problem.rows[k].a_u.size()) != du)
      throw_error(ErrorCode::InvalidArgument, "row dimension mismatch");
    rows[k] = stacked_row(problem.rows[k], dz);
    if (!rows[k].allFinite() || !std::isfinite(problem.rows[k].b))
      throw_error(ErrorCode::InvalidArgument, "row entries must be finite");
  }

  // H = diag(2, ..., 2, 2w); Hinv applied componentwise.
  Eigen::VectorXd hinv_diag = Eigen::VectorXd::Constant(dz, 0.5);
  hinv_diag(dz - 1) = 0.5 / problem.slack_weight;

  // Subsets ordered by cardinality, then ascending bitmask: the first
  // certified candidate realizes the smallest active set with lowest
  // row indices.
  std::vector<uint32_t> order;
  order.reserve(size_t(1) << m);
  for (int size = 0; size <= m; ++size)
    for (uint32_t mask = 0; mask < (1u << m); ++mask)
      if (std::popcount(mask) == size) order.push_back(mask);

  bool skipped_ill_conditioned = false;
  for (uint32_t mask : order) {
    const int k = std::popcount(mask);
    if (k > dz) break;  // rank-deficient by construction, like all supersets

    Eigen::VectorXd z = Eigen::VectorXd::Zero(dz);
    Eigen::VectorXd lambda_active;
    std::vector<int> active;
    if (k > 0) {
      active.reserve(k);
      for (int r = 0; r < m; ++r)
        if (mask & (1u << r)) active.push_back(r);

      Eigen::MatrixXd a_mat(k, dz);
      Eigen::VectorXd b_vec(k);
      for (int r = 0; r < k; ++r) {
        a_mat.row(r) = rows[active[r]];
        b_vec(r) = problem.rows[active[r]].b;
      }
      // normal matrix A Hinv A^T
      const Eigen::MatrixXd normal =
          a_mat * hinv_diag.asDiagonal() * a_mat.transpose();
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          normal, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double smax = svd.singularValues()(0);
      const double smin = svd.singularValues()(k - 1);
      if (smin <= 0.0 || smax / smin > kConditionLimit) {
        if (smin > 0.0 && smax / smin > kConditionLimit &&
            smax / smin < 1e15)
          skipped_ill_conditioned = true;
        continue;  // equality-degenerate active set
      }
      lambda_active = svd.solve(b_vec);
      z = hinv_diag.asDiagonal() * a_mat.transpose() * lambda_active;
      if ((lambda_active.array() < -1e-10).any()) continue;
    }

    // primal feasibility over all rows
    bool feasible = true;
    for (int r = 0; r < m && feasible; ++r) {
      const double slack = rows[r].dot(z) - problem.rows[r].b;
      if (slack < -1e-9 * (1.0 + std::abs(problem.rows[r].b))) feasible = false;
    }
    if (!feasible) continue;

    QpSolution sol;
    sol.u_star = z.head(du);
    sol.delta_star = z(dz - 1);
    sol.lambda = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < k; ++r)
      sol.lambda(active[r]) = std::max(0.0, lambda_active(r));
    sol.active_set = active;
    sol.kkt_residual = kkt_residual(problem, sol);
    if (sol.kkt_residual <= kResidualLimit) return sol;
  }

  if (skipped_ill_conditioned)
    throw_error(ErrorCode::NumericallyIllConditioned,
                "active-set normal matrix condition exceeds 1e12");
  throw_error(ErrorCode::Infeasible,
              "active-set enumeration exhausted all " +
                  std::to_string(size_t(1) << m) + " subsets");
}

Eigen::VectorXd solve_single_closed_form(const Eigen::VectorXd& grad_j,
                                         double j_value,
                                         const ClassKappa& alpha) {
  if (j_value < 0.0)
    throw_error(ErrorCode::NegativeCost, "cost must be nonnegative");
  return alpha(-j_value) * grad_j / (1.0 + grad_j.squaredNorm());
}

double kkt_residual(const QpProblem& problem, const QpSolution& candidate) {
  const int m = int(problem.rows.size());
  const int du = problem.dim_u;
  const int dz = du + 1;
  if (int(candidate.lambda.size()) != m)
    throw_error(ErrorCode::InvalidArgument, "candidate needs one dual per row");

  Eigen::VectorXd z(dz);
  z.head(du) = candidate.u_star;
  z(dz - 1) = candidate.delta_star;

  double primal = 0.0, dual = 0.0, comp = 0.0;
  Eigen::VectorXd grad_obj(dz);
  grad_obj.head(du) = 2.0 * candidate.u_star;
  grad_obj(dz - 1) = 2.0 * problem.slack_weight * candidate.delta_star;
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(dz);
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd a = stacked_row(problem.rows[k], dz);
    const double slack = a.dot(z) - problem.rows[k].b;
    primal = std::max(primal, -slack);
    dual = std::max(dual, -candidate.lambda(k));
    comp = std::max(comp, std::abs(candidate.lambda(k) * slack));
    weighted += candidate.lambda(k) * a;
  }
  const double stationarity = (grad_obj - weighted).norm();
  return std::max({primal, dual, comp, stationarity});
}

}  // namespace cdmr
