#ifndef CDMR_TASKS_HPP
#define CDMR_TASKS_HPP

#include <Eigen/Dense>
#include <vector>

#include "cdmr/geometry.hpp"

namespace cdmr {

/// Undirected interaction graph; formation edges carry desired distances.
class InteractionGraph {
 public:
  struct Edge {
    int i = 0;
    int j = 0;
    double desired_distance = 0.0;  // d_ij >= 0
  };

  InteractionGraph() = default;
  // Validates indices, symmetry (duplicate (j,i) entries must agree with
  // (i,j)) and d_ij >= 0. Edges are stored canonically with i < j.
  static InteractionGraph from_edges(int robot_count, std::vector<Edge> edges);

  int robot_count() const { return robot_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
  double desired_distance(int i, int j) const;
  bool has_edge(int i, int j) const;

 private:
  int robot_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Local cost, its gradient with respect to the robot's own position and
/// the extra constraint right-hand term (nonzero only for time-varying
/// density coverage).
struct TaskEvaluation {
  double cost = 0.0;
  Vec2 gradient{0, 0};
  double extra_rhs = 0.0;
};

struct CoverageConfig {
  int quadrature_resolution = 128;
  double fd_eps = -1.0;  // <= 0: 1e-5 * diam(domain)
  double fd_tau = 1e-4;
};

/// J_i = sum over neighbors of 0.5 (|x_i-x_j| - d_ij)^2. Throws
/// CoincidentNeighbors when a neighbor with d_ij > 0 coincides with x_i
/// (the gradient weight is singular there). With d_ij = 0 the weight is
/// exactly 1 and the evaluation reduces to the consensus protocol.
TaskEvaluation formation_eval(int i, const std::vector<Vec2>& positions,
                              const InteractionGraph& graph);

/// J_i = 0.5 |x_i - G_i|^2 with gradient (x_i-G_i)^T (I - dG_i/dx_i);
/// the centroid Jacobian comes from the finite-difference machinery.
TaskEvaluation coverage_eval(int i, const std::vector<Vec2>& positions,
                             const ConvexPolygon& domain,
                             const DensityField& density, double t,
                             const CoverageConfig& config = {});

/// Coverage against a time-varying density; extra_rhs =
/// -(x_i-G_i)^T dG_i/dt feeds the constraint right-hand side.
TaskEvaluation tvd_coverage_eval(int i, const std::vector<Vec2>& positions,
                                 const ConvexPolygon& domain,
                                 const DensityField& density, double t,
                                 const CoverageConfig& config = {});

/// Centralized comparison law u = (I - dG/dx)^{-1} ((G-x) + dG/dt) on the
/// ensemble state. Comparison harness only. Throws SingularJacobian when
/// the matrix condition exceeds 1e10.
Eigen::VectorXd tvd_centralized_control(const std::vector<Vec2>& positions,
                                        const ConvexPolygon& domain,
                                        const DensityField& density, double t,
                                        const CoverageConfig& config = {});

/// Truncated-Neumann comparison law u = (I + dG/dx) ((G-x) + dG/dt).
Eigen::VectorXd tvd_neumann_control(const std::vector<Vec2>& positions,
                                    const ConvexPolygon& domain,
                                    const DensityField& density, double t,
                                    const CoverageConfig& config = {});

/// Ensemble centroid Jacobian dG/dx (2N x 2N) by central differences with
/// full partition recomputation per perturbed coordinate.
Eigen::MatrixXd ensemble_centroid_jacobian_fd(
    const std::vector<Vec2>& positions, const ConvexPolygon& domain,
    const DensityField& density, double t, const CoverageConfig& config = {});

/// Global double-sum formation cost (each undirected edge counted from
/// both endpoints), equal to the sum of the local J_i.
double formation_global_cost(const std::vector<Vec2>& positions,
                             const InteractionGraph& graph);

/// Sum of local coverage costs over the current partition.
double coverage_global_cost(const std::vector<Vec2>& positions,
                            const ConvexPolygon& domain,
                            const DensityField& density, double t,
                            const CoverageConfig& config = {});

}  // namespace cdmr

#endif  // CDMR_TASKS_HPP
