#include "cdmr/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdmr {

namespace {

constexpr double kCoincidentTol = 1e-9;

Vec2 weighted_centroid_of(const ConvexPolygon& domain,
                          const std::vector<Vec2>& positions,
                          const DensityField& density, double t, int i,
                          int resolution) {
  const std::vector<VoronoiCell> cells = voronoi_partition(domain, positions);
  if (density.kind() == DensityField::Kind::Uniform) return cells[i].centroid;
  const QuadratureSpec quad = QuadratureSpec::over(domain, resolution);
  return cell_mass_centroid(cells[i].polygon, density, t, quad).centroid;
}

}  // namespace

InteractionGraph InteractionGraph::from_edges(int robot_count,
                                              std::vector<Edge> edges) {
  if (robot_count < 0)
    throw_error(ErrorCode::InvalidArgument, "robot count must be >= 0");
  InteractionGraph g;
  g.robot_count_ = robot_count;
  g.adjacency_.resize(robot_count);
  for (Edge e : edges) {
    if (e.i == e.j || e.i < 0 || e.j < 0 || e.i >= robot_count ||
        e.j >= robot_count)
      throw_error(ErrorCode::ValidationError,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                      ") out of range or a self-loop");
    if (e.desired_distance < 0.0)
      throw_error(ErrorCode::ValidationError, "desired distance must be >= 0");
    if (e.i > e.j) std::swap(e.i, e.j);
    bool duplicate = false;
    for (const Edge& known : g.edges_) {
      if (known.i == e.i && known.j == e.j) {
        if (std::abs(known.desired_distance - e.desired_distance) > 1e-12)
          throw_error(ErrorCode::ValidationError,
                      "asymmetric desired distance for edge (" +
                          std::to_string(e.i) + "," + std::to_string(e.j) + ")");
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    g.edges_.push_back(e);
    g.adjacency_[e.i].push_back(e.j);
    g.adjacency_[e.j].push_back(e.i);
  }
  for (std::vector<int>& adj : g.adjacency_)
    std::sort(adj.begin(), adj.end());
  return g;
}

double InteractionGraph::desired_distance(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const Edge& e : edges_)
    if (e.i == i && e.j == j) return e.desired_distance;
  throw_error(ErrorCode::InvalidArgument, "no such edge");
}

bool InteractionGraph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const Edge& e : edges_)
    if (e.i == i && e.j == j) return true;
  return false;
}

TaskEvaluation formation_eval(int i, const std::vector<Vec2>& positions,
                              const InteractionGraph& graph) {
  TaskEvaluation eval;
  for (int j : graph.neighbors(i)) {
    const Vec2 diff = positions[i] - positions[j];
    const double dist = diff.norm();
    const double desired = graph.desired_distance(i, j);
    if (dist <= kCoincidentTol) {
      if (desired > 0.0)
        throw_error(ErrorCode::CoincidentNeighbors,
                    "robots " + std::to_string(i) + " and " +
                        std::to_string(j) +
                        " coincide with nonzero desired distance");
      continue;  // consensus term: weight 1, zero contribution at overlap
    }
    const double err = dist - desired;
    eval.cost += 0.5 * err * err;
    eval.gradient += (desired == 0.0 ? 1.0 : err / dist) * diff;
  }
  return eval;
}

namespace {

TaskEvaluation coverage_eval_at(int i, const std::vector<Vec2>& positions,
                                const ConvexPolygon& domain,
                                const DensityField& density, double t,
                                const CoverageConfig& config, Vec2* centroid_out) {
  const Vec2 centroid = weighted_centroid_of(domain, positions, density, t, i,
                                             config.quadrature_resolution);
  const Mat2 jac = centroid_jacobian_fd(domain, positions, density, t, i,
                                        config.fd_eps,
                                        config.quadrature_resolution);
  TaskEvaluation eval;
  const Vec2 err = positions[i] - centroid;
  eval.cost = 0.5 * err.squaredNorm();
  eval.gradient = (Mat2::Identity() - jac).transpose() * err;
  if (centroid_out) *centroid_out = centroid;
  return eval;
}

}  // namespace

TaskEvaluation coverage_eval(int i, const std::vector<Vec2>& positions,
                             const ConvexPolygon& domain,
                             const DensityField& density, double t,
                             const CoverageConfig& config) {
  return coverage_eval_at(i, positions, domain, density, t, config, nullptr);
}

TaskEvaluation tvd_coverage_eval(int i, const std::vector<Vec2>& positions,
                                 const ConvexPolygon& domain,
                                 const DensityField& density, double t,
                                 const CoverageConfig& config) {
  Vec2 centroid;
  TaskEvaluation eval =
      coverage_eval_at(i, positions, domain, density, t, config, &centroid);
  const Vec2 dgdt = centroid_time_derivative_fd(domain, positions, density, t,
                                                i, config.fd_tau,
                                                config.quadrature_resolution);
  eval.extra_rhs = -(positions[i] - centroid).dot(dgdt);
  return eval;
}

Eigen::MatrixXd ensemble_centroid_jacobian_fd(const std::vector<Vec2>& positions,
                                              const ConvexPolygon& domain,
                                              const DensityField& density,
                                              double t,
                                              const CoverageConfig& config) {
  const int n = int(positions.size());
  double eps = config.fd_eps;
  if (eps <= 0.0) eps = 1e-5 * domain.diameter();
  const int res = config.quadrature_resolution;

  auto centroids_at = [&](const std::vector<Vec2>& pos) {
    const std::vector<VoronoiCell> cells =
        density.kind() == DensityField::Kind::Uniform
            ? voronoi_partition(domain, pos)
            : weighted_partition(domain, pos, density, t, res);
    Eigen::VectorXd g(2 * n);
    for (int k = 0; k < n; ++k) g.segment<2>(2 * k) = cells[k].centroid;
    return g;
  };

  Eigen::MatrixXd jac(2 * n, 2 * n);
  std::vector<Vec2> p = positions;
  for (int col = 0; col < 2 * n; ++col) {
    const int robot = col / 2;
    const int dim = col % 2;
    p[robot][dim] += eps;
    const Eigen::VectorXd gp = centroids_at(p);
    p[robot][dim] -= 2.0 * eps;
    const Eigen::VectorXd gm = centroids_at(p);
    p[robot][dim] = positions[robot][dim];
    jac.col(col) = (gp - gm) / (2.0 * eps);
  }
  return jac;
}

namespace {

Eigen::VectorXd tvd_drive_term(const std::vector<Vec2>& positions,
                               const ConvexPolygon& domain,
                               const DensityField& density, double t,
                               const CoverageConfig& config) {
  const int n = int(positions.size());
  const std::vector<VoronoiCell> cells =
      density.kind() == DensityField::Kind::Uniform
          ? voronoi_partition(domain, positions)
          : weighted_partition(domain, positions, density, t,
                               config.quadrature_resolution);
  Eigen::VectorXd drive(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 dgdt = centroid_time_derivative_fd(
        domain, positions, density, t, i, config.fd_tau,
        config.quadrature_resolution);
    drive.segment<2>(2 * i) = (cells[i].centroid - positions[i]) + dgdt;
  }
  return drive;
}

}  // namespace

Eigen::VectorXd tvd_centralized_control(const std::vector<Vec2>& positions,
                                        const ConvexPolygon& domain,
                                        const DensityField& density, double t,
                                        const CoverageConfig& config) {
  const int n = int(positions.size());
  const Eigen::MatrixXd jac =
      ensemble_centroid_jacobian_fd(positions, domain, density, t, config);
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(2 * n, 2 * n) - jac;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      system, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(2 * n - 1);
  if (smin <= 0.0 || svd.singularValues()(0) / smin > 1e10)
    throw_error(ErrorCode::SingularJacobian,
                "(I - dG/dx) is numerically singular");
  return svd.solve(tvd_drive_term(positions, domain, density, t, config));
}

Eigen::VectorXd tvd_neumann_control(const std::vector<Vec2>& positions,
                                    const ConvexPolygon& domain,
                                    const DensityField& density, double t,
                                    const CoverageConfig& config) {
  const int n = int(positions.size());
  const Eigen::MatrixXd jac =
      ensemble_centroid_jacobian_fd(positions, domain, density, t, config);
  return (Eigen::MatrixXd::Identity(2 * n, 2 * n) + jac) *
         tvd_drive_term(positions, domain, density, t, config);
}

double formation_global_cost(const std::vector<Vec2>& positions,
                             const InteractionGraph& graph) {
  double total = 0.0;
  for (int i = 0; i < graph.robot_count(); ++i)
    total += formation_eval(i, positions, graph).cost;
  return total;
}

double coverage_global_cost(const std::vector<Vec2>& positions,
                            const ConvexPolygon& domain,
                            const DensityField& density, double t,
                            const CoverageConfig& config) {
  const std::vector<VoronoiCell> cells =
      density.kind() == DensityField::Kind::Uniform
          ? voronoi_partition(domain, positions)
          : weighted_partition(domain, positions, density, t,
                               config.quadrature_resolution);
  double total = 0.0;
  for (size_t i = 0; i < positions.size(); ++i)
    total += 0.5 * (positions[i] - cells[i].centroid).squaredNorm();
  return total;
}

}  // namespace cdmr
