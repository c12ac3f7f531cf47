#include "cdmr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdmr {

namespace {

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

bool charging_now(const Scenario& sc, const RobotState& robot, int i) {
  if (!sc.survivability.enabled) return false;
  const ChargingStation station{sc.survivability.stations[i],
                                sc.survivability.d_chg};
  return (robot.position - station.location).norm() <= station.radius &&
         robot.battery.energy < robot.battery.e_chg;
}

TaskEvaluation evaluate_task(int i, const WorldSnapshot& snap,
                             const Scenario& sc) {
  std::vector<Vec2> positions(snap.robots.size());
  for (size_t k = 0; k < snap.robots.size(); ++k)
    positions[k] = snap.robots[k].position;
  switch (sc.task) {
    case TaskKind::Formation:
    case TaskKind::Consensus:
      return formation_eval(i, positions, snap.graph);
    case TaskKind::Coverage:
      return coverage_eval(i, positions, sc.domain, sc.density, snap.time,
                           sc.coverage_config());
    case TaskKind::TvdCoverage:
      return tvd_coverage_eval(i, positions, sc.domain, sc.density, snap.time,
                               sc.coverage_config());
  }
  return {};
}

struct RobotRows {
  QpProblem problem;
  std::vector<BarrierSpec> specs;  // parallel to problem.rows
  TaskEvaluation task;
  bool docked = false;
  bool coincident_kick = false;
};

RobotRows assemble_rows(int i, const WorldSnapshot& snap, const Scenario& sc) {
  RobotRows out;
  out.task = evaluate_task(i, snap, sc);
  out.docked = charging_now(sc, snap.robots[i], i);
  out.problem.dim_u = 2;
  out.problem.slack_weight = sc.slack_weight;

  if (!out.docked) {
    BarrierSpec spec =
        task_barrier(out.task.cost, out.task.gradient, sc.alpha_task);
    spec.drift = -out.task.extra_rhs;  // u-independent part of hdot
    out.specs.push_back(spec);
    out.problem.rows.push_back(cbf_row(spec));
  }

  if (sc.survivability.enabled) {
    const ChargingStation station{sc.survivability.stations[i],
                                  sc.survivability.d_chg};
    const RobotState& robot = snap.robots[i];
    const double rate = out.docked ? robot.battery.charge_rate
                                   : -robot.battery.drain_rate;
    BarrierSpec spec = energy_barrier_spec(robot.position, robot.battery,
                                           station, sc.survivability.k,
                                           sc.alpha_hard, rate);
    out.specs.push_back(spec);
    out.problem.rows.push_back(cbf_row(spec));
  }

  for (const Obstacle& obstacle : sc.survivability.obstacles) {
    const Vec2 xo = obstacle.position(snap.time);
    const double dist = (snap.robots[i].position - xo).norm();
    if (dist > sc.sensing_radius) continue;
    if (dist < 1e-12) out.coincident_kick = true;
    BarrierSpec spec = obstacle_barrier_spec(snap.robots[i].position, obstacle,
                                             snap.time, sc.alpha_hard);
    out.specs.push_back(spec);
    out.problem.rows.push_back(cbf_row(spec));
  }
  return out;
}

void refresh_partition(WorldSnapshot& snap, const Scenario& sc) {
  if (!sc.coverage_task()) {
    snap.partition.clear();
    return;
  }
  std::vector<Vec2> positions(snap.robots.size());
  for (size_t k = 0; k < snap.robots.size(); ++k)
    positions[k] = snap.robots[k].position;
  snap.partition = voronoi_partition(sc.domain, positions);
}

void refresh_graph(WorldSnapshot& snap, const Scenario& sc) {
  if (sc.task == TaskKind::Formation) {
    snap.graph = sc.graph;
  } else if (sc.task == TaskKind::Consensus) {
    std::vector<Vec2> positions(snap.robots.size());
    for (size_t k = 0; k < snap.robots.size(); ++k)
      positions[k] = snap.robots[k].position;
    snap.graph = sensing_graph(positions, sc.sensing_radius);
  } else {
    snap.graph = InteractionGraph::from_edges(int(snap.robots.size()), {});
  }
}

void verify_step(const WorldSnapshot& snap, const Scenario& sc,
                 const StepDiagnostics& diag) {
  std::ostringstream why;
  // partition tiling and neighbor symmetry
  if (sc.coverage_task() && !snap.partition.empty()) {
    double total = 0.0;
    for (const VoronoiCell& cell : snap.partition)
      total += cell.polygon.empty() ? 0.0 : cell.polygon.area();
    if (std::abs(total - sc.domain.area()) > 1e-9 * sc.domain.area()) {
      why << "partition tiling violated: " << total << " vs "
          << sc.domain.area();
      throw_error(ErrorCode::VerificationFailed, why.str());
    }
    for (const VoronoiCell& cell : snap.partition)
      for (int j : cell.neighbors) {
        const auto& back = snap.partition[j].neighbors;
        if (std::find(back.begin(), back.end(), cell.owner) == back.end())
          throw_error(ErrorCode::VerificationFailed,
                      "neighbor symmetry violated");
      }
  }
  for (size_t i = 0; i < diag.kkt.size(); ++i) {
    if (diag.kkt[i] > 1e-8)
      throw_error(ErrorCode::VerificationFailed,
                  "KKT residual above 1e-8 for robot " + std::to_string(i));
    if (diag.task[i].cost < 0.0)
      throw_error(ErrorCode::VerificationFailed, "negative local cost");
  }
  if (diag.witness_valid &&
      diag.witness_lhs < diag.witness_rhs - 1e-7 * (1.0 + std::abs(diag.witness_rhs)))
    throw_error(ErrorCode::VerificationFailed,
                "summed local constraints violate the global inequality");
  for (const RobotState& robot : snap.robots) {
    if (sc.survivability.enabled &&
        (robot.battery.energy < 0.0 || robot.battery.energy > robot.battery.e_chg))
      throw_error(ErrorCode::VerificationFailed, "battery outside [0, e_chg]");
    if (robot.heading <= -M_PI - 1e-12 || robot.heading > M_PI + 1e-12)
      throw_error(ErrorCode::VerificationFailed, "heading not wrapped");
  }
}

}  // namespace

void Scenario::validate() const {
  if (domain.empty())
    throw_error(ErrorCode::ValidationError, "domain: polygon required");
  const int n = robot_count();
  if (n < 1)
    throw_error(ErrorCode::ValidationError, "robots: at least one required");
  for (int i = 0; i < n; ++i)
    if (!domain.contains(initial_positions[i], 1e-9))
      throw_error(ErrorCode::ValidationError,
                  "robots[" + std::to_string(i) + "]: outside domain");
  if (!initial_headings.empty() && int(initial_headings.size()) != n)
    throw_error(ErrorCode::ValidationError,
                "robots: headings count must match positions");
  if (dt <= 0.0) throw_error(ErrorCode::ValidationError, "dt: must be > 0");
  if (horizon < 0.0)
    throw_error(ErrorCode::ValidationError, "horizon: must be >= 0");
  if (settle_tol <= 0.0)
    throw_error(ErrorCode::ValidationError, "settle_tol: must be > 0");
  if (slack_weight <= 0.0)
    throw_error(ErrorCode::ValidationError, "slack_weight: must be > 0");
  if (sensing_radius <= 0.0)
    throw_error(ErrorCode::ValidationError, "sensing_radius: must be > 0");
  if (quadrature_resolution < 2)
    throw_error(ErrorCode::ValidationError, "quadrature_resolution: >= 2");
  if (mode == DynamicsMode::Unicycle && unicycle_offset <= 0.0)
    throw_error(ErrorCode::ValidationError, "unicycle_offset: must be > 0");

  if (task == TaskKind::Formation) {
    if (graph.robot_count() != n)
      throw_error(ErrorCode::ValidationError,
                  "graph: robot count mismatch with positions");
    if (graph.edges().empty())
      throw_error(ErrorCode::ValidationError, "graph: formation needs edges");
  }

  if (survivability.enabled) {
    const SurvivabilitySpec& s = survivability;
    if (int(s.stations.size()) != n)
      throw_error(ErrorCode::ValidationError,
                  "survivability.stations: one per robot required");
    for (size_t k = 0; k < s.stations.size(); ++k)
      if (!domain.contains(s.stations[k], 1e-9))
        throw_error(ErrorCode::ValidationError,
                    "survivability.stations[" + std::to_string(k) +
                        "]: outside domain");
    if (s.d_chg <= 0.0)
      throw_error(ErrorCode::ValidationError, "survivability.d_chg: must be > 0");
    if (s.k <= 0.0)
      throw_error(ErrorCode::ValidationError, "survivability.k: must be > 0");
    s.battery.validate();
    if (int(s.initial_energy.size()) != n)
      throw_error(ErrorCode::ValidationError,
                  "survivability.battery.initial: one energy per robot");
    for (size_t k = 0; k < s.initial_energy.size(); ++k)
      if (s.initial_energy[k] < 0.0 || s.initial_energy[k] > s.battery.e_chg)
        throw_error(ErrorCode::ValidationError,
                    "survivability.battery.initial[" + std::to_string(k) +
                        "]: outside [0, e_chg]");
  }

  // obstacle rows are built with or without batteries
  for (size_t k = 0; k < survivability.obstacles.size(); ++k) {
    const Obstacle& o = survivability.obstacles[k];
    if (o.waypoints.empty())
      throw_error(ErrorCode::ValidationError,
                  "survivability.obstacles[" + std::to_string(k) +
                      "]: waypoints required");
    if (o.clearance <= 0.0)
      throw_error(ErrorCode::ValidationError,
                  "survivability.obstacles[" + std::to_string(k) +
                      "]: clearance must be > 0");
    if (o.speed < 0.0)
      throw_error(ErrorCode::ValidationError,
                  "survivability.obstacles[" + std::to_string(k) +
                      "]: speed must be >= 0");
  }
}

InteractionGraph sensing_graph(const std::vector<Vec2>& positions,
                               double radius) {
  if (radius <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "sensing radius must be > 0");
  const int n = int(positions.size());
  std::vector<InteractionGraph::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((positions[i] - positions[j]).norm() <= radius)
        edges.push_back({i, j, 0.0});
  return InteractionGraph::from_edges(n, std::move(edges));
}

QpProblem assemble_robot_qp(int i, const WorldSnapshot& snapshot,
                            const Scenario& scenario) {
  return assemble_rows(i, snapshot, scenario).problem;
}

std::pair<double, double> unicycle_map(const Vec2& u_desired, double heading,
                                       double d_offset) {
  if (d_offset <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "unicycle offset must be > 0");
  const double c = std::cos(heading), s = std::sin(heading);
  // R(theta)^T u
  const double ax = c * u_desired.x() + s * u_desired.y();
  const double ay = -s * u_desired.x() + c * u_desired.y();
  return {ax, ay / d_offset};
}

WorldSnapshot make_initial_snapshot(const Scenario& scenario) {
  WorldSnapshot snap;
  snap.time = 0.0;
  const int n = scenario.robot_count();
  snap.robots.resize(n);
  for (int i = 0; i < n; ++i) {
    snap.robots[i].position = scenario.initial_positions[i];
    snap.robots[i].heading =
        scenario.initial_headings.empty() ? 0.0 : scenario.initial_headings[i];
    if (scenario.survivability.enabled) {
      snap.robots[i].battery = scenario.survivability.battery;
      snap.robots[i].battery.energy = scenario.survivability.initial_energy[i];
    }
  }
  snap.obstacle_positions.clear();
  for (const Obstacle& o : scenario.survivability.obstacles)
    snap.obstacle_positions.push_back(o.position(0.0));
  refresh_partition(snap, scenario);
  refresh_graph(snap, scenario);
  return snap;
}

StepResult step(const WorldSnapshot& snapshot, const Scenario& scenario,
                double dt) {
  if (dt <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "step needs dt > 0");
  const int n = int(snapshot.robots.size());

  StepDiagnostics diag;
  diag.task.resize(n);
  diag.input.assign(n, Vec2{0, 0});
  diag.slack.assign(n, 0.0);
  diag.kkt.assign(n, 0.0);
  diag.docked.assign(n, false);
  bool any_docked = false;

  for (int i = 0; i < n; ++i) {
    RobotRows rows = assemble_rows(i, snapshot, scenario);
    diag.task[i] = rows.task;
    diag.docked[i] = rows.docked;
    diag.coincident_kick = diag.coincident_kick || rows.coincident_kick;
    any_docked = any_docked || rows.docked;

    QpSolution sol;
    try {
      sol = solve(rows.problem);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible) throw;
      std::ostringstream msg;
      msg << "robot " << i << " at t=" << snapshot.time
          << ": infeasible QP with rows [";
      for (size_t r = 0; r < rows.problem.rows.size(); ++r) {
        const ConstraintRow& row = rows.problem.rows[r];
        msg << (r ? "; " : "") << "label=" << int(row.label)
            << " a_u=(" << row.a_u(0) << "," << row.a_u(1) << ")"
            << " a_delta=" << row.a_delta << " b=" << row.b;
      }
      msg << "]";
      throw_error(ErrorCode::Infeasible, msg.str());
    }

    diag.input[i] = sol.u_star;
    diag.slack[i] = sol.delta_star;
    diag.kkt[i] = sol.kkt_residual;

    // hard-row observability: h values and commanded hdot per label
    for (const BarrierSpec& spec : rows.specs) {
      if (spec.slackable) continue;
      const double hdot = spec.grad_h_u.dot(sol.u_star) + spec.drift;
      if (spec.label == RowLabel::Energy) {
        if (std::isnan(diag.min_h_energy) || spec.h < diag.min_h_energy)
          diag.min_h_energy = spec.h;
        diag.max_hdot_energy = std::max(diag.max_hdot_energy, std::abs(hdot));
      } else if (spec.label == RowLabel::Obstacle) {
        if (std::isnan(diag.min_h_obstacle) || spec.h < diag.min_h_obstacle)
          diag.min_h_obstacle = spec.h;
        diag.max_hdot_obstacle =
            std::max(diag.max_hdot_obstacle, std::abs(hdot));
      }
    }
  }

  // obstacle clearances; the distance budget uses the approach rate
  // -d/dt |x_i - x_o| (one Euler step can shrink a distance by at most
  // approach * dt up to curvature)
  for (const Obstacle& obstacle : scenario.survivability.obstacles) {
    const Vec2 xo = obstacle.position(snapshot.time);
    const Vec2 vo = obstacle.velocity(snapshot.time);
    for (int i = 0; i < n; ++i) {
      const Vec2 diff = snapshot.robots[i].position - xo;
      const double dist = diff.norm();
      if (std::isnan(diag.min_obstacle_clearance) ||
          dist < diag.min_obstacle_clearance)
        diag.min_obstacle_clearance = dist;
      if (dist > 1e-12) {
        const double approach =
            -diff.dot(Vec2(diag.input[i]) - vo) / dist;
        diag.max_obstacle_rel_speed =
            std::max(diag.max_obstacle_rel_speed, approach);
      }
    }
  }

  // decentralization witness: summed local rows imply the global
  // inequality -dJ/dx . u >= -alpha'(-J) - delta' with alpha' = 2 alpha,
  // delta' = 2 sum delta_i; for undirected pairwise costs the factor-two
  // identity makes the left side 2 sum_i (-dJ_i/dx_i . u_i). Moving-density
  // rows carry the centroid-motion term on their right-hand side, so it
  // appears here as well.
  double cost_sum = 0.0, local_sum = 0.0, slack_sum = 0.0, extra_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    cost_sum += diag.task[i].cost;
    local_sum += -diag.task[i].gradient.dot(diag.input[i]);
    slack_sum += diag.slack[i];
    extra_sum += diag.task[i].extra_rhs;
  }
  diag.global_cost = cost_sum;
  diag.witness_lhs = 2.0 * local_sum;
  diag.witness_rhs = -2.0 * scenario.alpha_task(-cost_sum) -
                     2.0 * slack_sum + 2.0 * extra_sum;
  diag.witness_valid = !any_docked;

  // integrate
  WorldSnapshot next = snapshot;
  next.time = snapshot.time + dt;
  for (int i = 0; i < n; ++i) {
    RobotState& robot = next.robots[i];
    if (scenario.mode == DynamicsMode::SingleIntegrator) {
      robot.position += diag.input[i] * dt;
    } else {
      const auto [v, omega] =
          unicycle_map(diag.input[i], robot.heading, scenario.unicycle_offset);
      robot.position += v * Vec2{std::cos(robot.heading),
                                 std::sin(robot.heading)} * dt;
      robot.heading = wrap_angle(robot.heading + omega * dt);
    }
    if (scenario.survivability.enabled) {
      const auto [battery, depleted] =
          battery_step(robot.battery, diag.docked[i], dt);
      robot.battery = battery;
      diag.depleted = diag.depleted || depleted;
    }
  }
  next.obstacle_positions.clear();
  for (const Obstacle& o : scenario.survivability.obstacles)
    next.obstacle_positions.push_back(o.position(next.time));
  refresh_partition(next, scenario);
  if (scenario.task == TaskKind::Consensus) refresh_graph(next, scenario);

  return {std::move(next), std::move(diag)};
}

RunMetrics run(const Scenario& scenario, bool verify, int frames_stride) {
  scenario.validate();
  RunMetrics metrics;
  const int n = scenario.robot_count();
  const int steps = int(std::llround(scenario.horizon / scenario.dt));
  metrics.rows.reserve(steps);

  WorldSnapshot snap = make_initial_snapshot(scenario);
  std::vector<double> prev_energy(n);
  const double mid_energy =
      0.5 * (scenario.survivability.battery.e_min +
             scenario.survivability.battery.e_chg);
  if (scenario.survivability.enabled) {
    metrics.charge_cycles.assign(n, 0);
    for (int i = 0; i < n; ++i)
      prev_energy[i] = scenario.survivability.initial_energy[i];
  }

  double max_hdot_energy = 0.0, max_hdot_obstacle = 0.0, max_rel_speed = 0.0;

  for (int k = 0; k < steps; ++k) {
    const double t = k * scenario.dt;
    snap.time = t;
    if (frames_stride > 0 && k % frames_stride == 0) {
      metrics.frames.push_back(snap);
      metrics.frame_times.push_back(t);
    }

    StepResult result = step(snap, scenario, scenario.dt);

    MetricsRow row;
    row.t = t;
    row.global_cost = result.diag.global_cost;
    row.robot_cost.resize(n);
    row.robot_slack.resize(n);
    row.robot_kkt.resize(n);
    for (int i = 0; i < n; ++i) {
      row.robot_cost[i] = result.diag.task[i].cost;
      row.robot_slack[i] = result.diag.slack[i];
      row.robot_kkt[i] = result.diag.kkt[i];
    }
    if (scenario.survivability.enabled) {
      row.robot_energy.resize(n);
      for (int i = 0; i < n; ++i) {
        row.robot_energy[i] = snap.robots[i].battery.energy;
        if (std::isnan(metrics.min_energy) ||
            snap.robots[i].battery.energy < metrics.min_energy)
          metrics.min_energy = snap.robots[i].battery.energy;
      }
    }
    row.min_h_energy = result.diag.min_h_energy;
    row.min_h_obstacle = result.diag.min_h_obstacle;
    row.min_obstacle_clearance = result.diag.min_obstacle_clearance;
    row.witness_lhs = result.diag.witness_lhs;
    row.witness_rhs = result.diag.witness_rhs;
    row.witness_valid = result.diag.witness_valid;
    metrics.rows.push_back(std::move(row));

    metrics.any_depleted = metrics.any_depleted || result.diag.depleted;
    metrics.coincident_kick_hit =
        metrics.coincident_kick_hit || result.diag.coincident_kick;
    max_hdot_energy = std::max(max_hdot_energy, result.diag.max_hdot_energy);
    max_hdot_obstacle =
        std::max(max_hdot_obstacle, result.diag.max_hdot_obstacle);
    max_rel_speed =
        std::max(max_rel_speed, result.diag.max_obstacle_rel_speed);
    if (!std::isnan(result.diag.min_obstacle_clearance) &&
        (std::isnan(metrics.min_obstacle_distance) ||
         result.diag.min_obstacle_clearance < metrics.min_obstacle_distance))
      metrics.min_obstacle_distance = result.diag.min_obstacle_clearance;

    if (verify) verify_step(snap, scenario, result.diag);

    snap = std::move(result.next);

    // charge-cycle counting: upward crossings of the midpoint level
    if (scenario.survivability.enabled) {
      for (int i = 0; i < n; ++i) {
        const double e = snap.robots[i].battery.energy;
        if (prev_energy[i] < mid_energy && e >= mid_energy)
          metrics.charge_cycles[i] += 1;
        prev_energy[i] = e;
      }
    }
  }

  // fold the terminal state into the trajectory minima
  if (scenario.survivability.enabled) {
    for (int i = 0; i < n; ++i) {
      if (std::isnan(metrics.min_energy) ||
          snap.robots[i].battery.energy < metrics.min_energy)
        metrics.min_energy = snap.robots[i].battery.energy;
    }
    for (const Obstacle& o : scenario.survivability.obstacles) {
      const Vec2 xo = o.position(snap.time);
      for (int i = 0; i < n; ++i) {
        const double dist = (snap.robots[i].position - xo).norm();
        if (std::isnan(metrics.min_obstacle_distance) ||
            dist < metrics.min_obstacle_distance)
          metrics.min_obstacle_distance = dist;
      }
    }
  }

  metrics.eps_energy = scenario.dt * max_hdot_energy;
  metrics.eps_obstacle_h = scenario.dt * max_hdot_obstacle;
  metrics.eps_obstacle_dist = scenario.dt * max_rel_speed;

  // settling: first t with J <= settle_tol sustained for 50 steps
  const int sustain = 50;
  for (int k = 0; k + sustain <= int(metrics.rows.size()); ++k) {
    bool settled = true;
    for (int j = k; j < k + sustain; ++j)
      if (metrics.rows[j].global_cost > scenario.settle_tol) {
        settled = false;
        break;
      }
    if (settled) {
      metrics.settling_time = metrics.rows[k].t;
      break;
    }
  }

  if (frames_stride > 0) {
    metrics.frames.push_back(snap);
    metrics.frame_times.push_back(snap.time);
  }
  metrics.final_state = std::move(snap);
  return metrics;
}

}  // namespace cdmr
