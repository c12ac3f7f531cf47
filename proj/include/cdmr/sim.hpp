#ifndef CDMR_SIM_HPP
#define CDMR_SIM_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cdmr/qp.hpp"
#include "cdmr/survivability.hpp"
#include "cdmr/tasks.hpp"

namespace cdmr {

enum class TaskKind { Formation, Coverage, TvdCoverage, Consensus };
enum class DynamicsMode { SingleIntegrator, Unicycle };

struct SurvivabilitySpec {
  bool enabled = false;
  double k = 0.02;
  double d_chg = 0.15;
  std::vector<Vec2> stations;  // one dedicated station per robot
  BatteryState battery;        // levels and rates; per-robot energy below
  std::vector<double> initial_energy;
  std::vector<Obstacle> obstacles;
};

/// Fully materialized run description; a validated Scenario plus the
/// engine determine a byte-for-byte reproducible run.
struct Scenario {
  std::string name = "custom";
  TaskKind task = TaskKind::Consensus;
  ConvexPolygon domain;
  std::vector<Vec2> initial_positions;
  std::vector<double> initial_headings;  // used in unicycle mode
  InteractionGraph graph;                // formation edges with d_ij
  DensityField density;
  ClassKappa alpha_task = ClassKappa::cube_root();
  ClassKappa alpha_hard = ClassKappa::linear(1.0);
  SurvivabilitySpec survivability;
  double dt = 0.01;
  double horizon = 60.0;
  double settle_tol = 1e-4;
  double slack_weight = 1.0;
  double sensing_radius = 1e9;
  int quadrature_resolution = 128;
  DynamicsMode mode = DynamicsMode::SingleIntegrator;
  double unicycle_offset = 0.1;
  uint64_t seed = 0;

  int robot_count() const { return int(initial_positions.size()); }
  bool coverage_task() const {
    return task == TaskKind::Coverage || task == TaskKind::TvdCoverage;
  }
  CoverageConfig coverage_config() const {
    CoverageConfig c;
    c.quadrature_resolution = quadrature_resolution;
    return c;
  }
  void validate() const;  // throws ValidationError
};

struct RobotState {
  Vec2 position{0, 0};
  double heading = 0.0;  // wrapped to (-pi, pi]
  BatteryState battery;  // meaningful only when survivability is enabled
};

struct WorldSnapshot {
  double time = 0.0;
  std::vector<RobotState> robots;
  std::vector<Vec2> obstacle_positions;
  std::vector<VoronoiCell> partition;  // filled for coverage tasks
  InteractionGraph graph;              // formation graph / current disk graph
};

struct StepDiagnostics {
  std::vector<TaskEvaluation> task;
  std::vector<Vec2> input;
  std::vector<double> slack;
  std::vector<double> kkt;
  std::vector<bool> docked;
  double global_cost = 0.0;
  double min_h_energy = std::numeric_limits<double>::quiet_NaN();
  double min_h_obstacle = std::numeric_limits<double>::quiet_NaN();
  double max_hdot_energy = 0.0;
  double max_hdot_obstacle = 0.0;
  double min_obstacle_clearance = std::numeric_limits<double>::quiet_NaN();
  double max_obstacle_rel_speed = 0.0;
  double witness_lhs = 0.0;
  double witness_rhs = 0.0;
  bool witness_valid = false;
  bool depleted = false;
  bool coincident_kick = false;
};

struct MetricsRow {
  double t = 0.0;
  double global_cost = 0.0;
  std::vector<double> robot_cost;
  std::vector<double> robot_slack;
  std::vector<double> robot_energy;
  std::vector<double> robot_kkt;
  double min_h_energy = std::numeric_limits<double>::quiet_NaN();
  double min_h_obstacle = std::numeric_limits<double>::quiet_NaN();
  double min_obstacle_clearance = std::numeric_limits<double>::quiet_NaN();
  double witness_lhs = 0.0;
  double witness_rhs = 0.0;
  bool witness_valid = false;
};

struct RunMetrics {
  std::vector<MetricsRow> rows;  // one per executed step
  double settling_time = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> charge_cycles;  // completed recharges per robot
  bool any_depleted = false;
  bool coincident_kick_hit = false;
  // Discretization budgets: eps = dt * max |commanded hdot| per label
  // (distance budget uses the max relative speed towards obstacles).
  double eps_energy = 0.0;
  double eps_obstacle_h = 0.0;
  double eps_obstacle_dist = 0.0;
  double min_energy = std::numeric_limits<double>::quiet_NaN();
  double min_obstacle_distance = std::numeric_limits<double>::quiet_NaN();
  WorldSnapshot final_state;
  std::vector<WorldSnapshot> frames;  // recorded at frames_stride
  std::vector<double> frame_times;
};

/// Closed-ball disk graph: edge iff |x_i - x_j| <= radius.
InteractionGraph sensing_graph(const std::vector<Vec2>& positions,
                               double radius);

/// Rows for robot i at the snapshot: slackable task row (dropped while
/// the robot charges), hard energy row, one hard row per obstacle within
/// sensing radius. Row order: task, energy, obstacles by index.
QpProblem assemble_robot_qp(int i, const WorldSnapshot& snapshot,
                            const Scenario& scenario);

/// Near-identity diffeomorphism: (v, omega) = diag(1, 1/d) R(theta)^T u.
std::pair<double, double> unicycle_map(const Vec2& u_desired, double heading,
                                       double d_offset);

WorldSnapshot make_initial_snapshot(const Scenario& scenario);

struct StepResult {
  WorldSnapshot next;
  StepDiagnostics diag;
};

/// One deterministic engine step: per-robot QP solve, explicit Euler
/// integration (single integrator or diffeomorphism-wrapped unicycle),
/// battery/obstacle/partition updates. Aborts with Infeasible naming the
/// robot when a QP has no solution.
StepResult step(const WorldSnapshot& snapshot, const Scenario& scenario,
                double dt);

/// Full run over the scenario horizon. verify turns the module
/// invariants into hard per-step assertions (VerificationFailed).
/// frames_stride > 0 records snapshots for rendering.
RunMetrics run(const Scenario& scenario, bool verify = false,
               int frames_stride = 0);

}  // namespace cdmr

#endif  // CDMR_SIM_HPP
