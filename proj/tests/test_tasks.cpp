#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cdmr/tasks.hpp"
#include "test_util.hpp"

using namespace cdmr;
using cdmr_test::Rng;

namespace {

ConvexPolygon unit_square() { return ConvexPolygon::rectangle({0, 0}, {1, 1}); }

InteractionGraph pair_graph(double d) {
  return InteractionGraph::from_edges(2, {{0, 1, d}});
}

// central finite difference of the local cost (full recomputation)
Vec2 fd_gradient(const std::function<double(const std::vector<Vec2>&)>& cost,
                 std::vector<Vec2> positions, int i, double eps) {
  Vec2 g;
  for (int dim = 0; dim < 2; ++dim) {
    positions[i][dim] += eps;
    const double jp = cost(positions);
    positions[i][dim] -= 2 * eps;
    const double jm = cost(positions);
    positions[i][dim] += eps;
    g[dim] = (jp - jm) / (2 * eps);
  }
  return g;
}

}  // namespace

TEST_CASE("interaction graph validation") {
  CHECK_THROWS_AS(InteractionGraph::from_edges(2, {{0, 0, 1.0}}), Error);
  CHECK_THROWS_AS(InteractionGraph::from_edges(2, {{0, 5, 1.0}}), Error);
  CHECK_THROWS_AS(InteractionGraph::from_edges(2, {{0, 1, -1.0}}), Error);
  // duplicate with inconsistent distance: asymmetric table
  CHECK_THROWS_AS(
      InteractionGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 2.0}}), Error);
  // duplicate with matching distance collapses to one undirected edge
  const InteractionGraph g =
      InteractionGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}});
  CHECK(g.edges().size() == 1);
  CHECK(g.neighbors(0) == std::vector<int>{1});
  CHECK(g.neighbors(1) == std::vector<int>{0});
}

TEST_CASE("formation_eval: worked pair example") {
  const std::vector<Vec2> pos{{1, 0}, {-1, 0}};
  const TaskEvaluation eval = formation_eval(0, pos, pair_graph(1.0));
  CHECK(eval.cost == doctest::Approx(0.5));
  CHECK(eval.gradient.x() == doctest::Approx(1.0));
  CHECK(eval.gradient.y() == doctest::Approx(0.0));

  // verified by central finite differences of J_i
  const Vec2 fd = fd_gradient(
      [&](const std::vector<Vec2>& p) {
        return formation_eval(0, p, pair_graph(1.0)).cost;
      },
      pos, 0, 1e-6);
  CHECK((eval.gradient - fd).norm() < 1e-8);
}

TEST_CASE("formation_eval: assembled formation has zero cost and gradient") {
  const InteractionGraph g = InteractionGraph::from_edges(
      3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, std::sqrt(3.0)}});
  // a 1-1-sqrt(3) triangle realized exactly
  const std::vector<Vec2> pos{{0, 0}, {1, 0}, {1.5, std::sqrt(3.0) / 2}};
  for (int i = 0; i < 3; ++i) {
    const TaskEvaluation eval = formation_eval(i, pos, g);
    CHECK(eval.cost == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eval.gradient.norm() < 1e-9);
  }
}

TEST_CASE("formation_eval: zero desired distances give the consensus protocol") {
  const InteractionGraph g =
      InteractionGraph::from_edges(3, {{0, 1, 0.0}, {0, 2, 0.0}});
  const std::vector<Vec2> pos{{0, 0}, {1, 2}, {-3, 1}};
  const TaskEvaluation eval = formation_eval(0, pos, g);
  const Vec2 expected = (pos[0] - pos[1]) + (pos[0] - pos[2]);
  CHECK((eval.gradient - expected).norm() == 0.0);
  // negative gradient = sum of (x_j - x_i): the consensus update
}

TEST_CASE("formation_eval: coincident neighbors rejected only for d_ij > 0") {
  const std::vector<Vec2> pos{{0.5, 0.5}, {0.5, 0.5}};
  try {
    formation_eval(0, pos, pair_graph(1.0));
    FAIL("expected CoincidentNeighbors");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoincidentNeighbors);
  }
  // consensus case is regular at the overlap
  const TaskEvaluation eval = formation_eval(0, pos, pair_graph(0.0));
  CHECK(eval.cost == 0.0);
  CHECK(eval.gradient.norm() == 0.0);
}

TEST_CASE("coverage_eval: robot at its centroid") {
  // symmetric pair at the centroids of the two half-squares
  const std::vector<Vec2> pos{{0.25, 0.5}, {0.75, 0.5}};
  for (int i = 0; i < 2; ++i) {
    const TaskEvaluation eval =
        coverage_eval(i, pos, unit_square(), DensityField::uniform(), 0.0);
    CHECK(eval.cost == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(eval.gradient.norm() < 1e-6);
    CHECK(eval.extra_rhs == 0.0);
  }
}

TEST_CASE("coverage_eval: single robot, fixed centroid") {
  const std::vector<Vec2> pos{{0.6, 0.5}};
  const TaskEvaluation eval =
      coverage_eval(0, pos, unit_square(), DensityField::uniform(), 0.0);
  // G = (0.5, 0.5) independent of x, dG/dx = 0
  CHECK(eval.cost == doctest::Approx(0.005).epsilon(1e-9));
  CHECK(eval.gradient.x() == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(eval.gradient.y() == doctest::Approx(0.0));

  const Vec2 fd = fd_gradient(
      [&](const std::vector<Vec2>& p) {
        return coverage_eval(0, p, unit_square(), DensityField::uniform(), 0.0)
            .cost;
      },
      pos, 0, 1e-6);
  CHECK((eval.gradient - fd).norm() < 1e-6);
}

TEST_CASE("tvd_coverage_eval: static density reduces to coverage_eval") {
  const std::vector<Vec2> pos{{0.3, 0.6}, {0.7, 0.4}};
  for (int i = 0; i < 2; ++i) {
    const TaskEvaluation cov =
        coverage_eval(i, pos, unit_square(), DensityField::uniform(), 0.0);
    const TaskEvaluation tvd =
        tvd_coverage_eval(i, pos, unit_square(), DensityField::uniform(), 0.0);
    CHECK(tvd.cost == doctest::Approx(cov.cost));
    CHECK((tvd.gradient - cov.gradient).norm() < 1e-12);
    CHECK(std::abs(tvd.extra_rhs) < 1e-12);
  }
}

TEST_CASE("tvd_coverage_eval: drifting gaussian worked example") {
  // single robot at (0.5,0.5); gaussian at (0.45,0.5) drifting at (0.1,0)
  DensityField density = DensityField::gaussian_sum(
      {{1.0, 0.08, {0.45, 0.5}, {0.1, 0.0}, 0, 0, 0}});
  CoverageConfig config;
  config.quadrature_resolution = 256;
  const std::vector<Vec2> pos{{0.5, 0.5}};
  const TaskEvaluation eval =
      tvd_coverage_eval(0, pos, unit_square(), density, 0.0, config);
  // extra_rhs = -(x-G).dGdt = -(0.05,0).(0.1,0) = -0.005
  CHECK(eval.extra_rhs == doctest::Approx(-0.005).epsilon(0.05));

  // robot exactly at the centroid: zero prefactor regardless of dG/dt
  const Vec2 centroid =
      weighted_partition(unit_square(), pos, density, 0.0, 256)[0].centroid;
  const TaskEvaluation at_centroid =
      tvd_coverage_eval(0, {centroid}, unit_square(), density, 0.0, config);
  CHECK(std::abs(at_centroid.extra_rhs) < 1e-6);
}

TEST_CASE("tvd_centralized_control cases") {
  // all robots at centroids, static uniform density -> u = 0
  const std::vector<Vec2> pos{{0.25, 0.5}, {0.75, 0.5}};
  const Eigen::VectorXd u = tvd_centralized_control(
      pos, unit_square(), DensityField::uniform(), 0.0);
  CHECK(u.norm() < 1e-6);

  // N=1: dG/dx = 0, u = (G-x) + dG/dt
  const std::vector<Vec2> one{{0.7, 0.3}};
  const Eigen::VectorXd u1 = tvd_centralized_control(
      one, unit_square(), DensityField::uniform(), 0.0);
  CHECK(u1(0) == doctest::Approx(0.5 - 0.7).epsilon(1e-6));
  CHECK(u1(1) == doctest::Approx(0.5 - 0.3).epsilon(1e-6));
}

TEST_CASE("tvd_centralized_control matches a test-local assembled solve") {
  const std::vector<Vec2> pos{{0.3, 0.3}, {0.7, 0.4}, {0.5, 0.8}};
  const int n = 3;
  const Eigen::VectorXd u = tvd_centralized_control(
      pos, unit_square(), DensityField::uniform(), 0.0);

  // independent assembly with a different step size and a direct inverse
  const double eps = 2e-5;
  auto centroids = [&](const std::vector<Vec2>& p) {
    const auto cells = voronoi_partition(unit_square(), p);
    Eigen::VectorXd g(2 * n);
    for (int k = 0; k < n; ++k) g.segment<2>(2 * k) = cells[k].centroid;
    return g;
  };
  Eigen::MatrixXd jac(2 * n, 2 * n);
  std::vector<Vec2> p = pos;
  for (int col = 0; col < 2 * n; ++col) {
    p[col / 2][col % 2] += eps;
    const Eigen::VectorXd gp = centroids(p);
    p[col / 2][col % 2] -= 2 * eps;
    const Eigen::VectorXd gm = centroids(p);
    p[col / 2][col % 2] = pos[col / 2][col % 2];
    jac.col(col) = (gp - gm) / (2 * eps);
  }
  const Eigen::VectorXd drive = centroids(pos) - Eigen::Map<const Eigen::VectorXd>(
      pos[0].data(), 2 * n);
  const Eigen::VectorXd oracle =
      (Eigen::MatrixXd::Identity(2 * n, 2 * n) - jac).inverse() * drive;
  CHECK((u - oracle).norm() < 1e-4);
}

TEST_CASE("tvd_neumann_control cases") {
  // N=1: dG/dx = 0, identical to the centralized law
  const std::vector<Vec2> one{{0.7, 0.3}};
  const Eigen::VectorXd uc = tvd_centralized_control(
      one, unit_square(), DensityField::uniform(), 0.0);
  const Eigen::VectorXd un = tvd_neumann_control(
      one, unit_square(), DensityField::uniform(), 0.0);
  CHECK((uc - un).norm() < 1e-9);

  // centroidal static configuration -> 0
  const std::vector<Vec2> pos{{0.25, 0.5}, {0.75, 0.5}};
  CHECK(tvd_neumann_control(pos, unit_square(), DensityField::uniform(), 0.0)
            .norm() < 1e-6);

  // generic configuration: differs from the exact law by O(|M|^2 drive)
  const std::vector<Vec2> rnd{{0.3, 0.3}, {0.7, 0.4}, {0.5, 0.8}};
  const Eigen::VectorXd ue = tvd_centralized_control(
      rnd, unit_square(), DensityField::uniform(), 0.0);
  const Eigen::VectorXd ua = tvd_neumann_control(
      rnd, unit_square(), DensityField::uniform(), 0.0);
  const Eigen::MatrixXd m = ensemble_centroid_jacobian_fd(
      rnd, unit_square(), DensityField::uniform(), 0.0);
  const double mnorm = m.norm();
  CHECK((ue - ua).norm() <= 4.0 * mnorm * mnorm * ue.norm() + 1e-9);
  CHECK((ue - ua).norm() > 0.0);
}

TEST_CASE("property: formation gradient matches finite differences") {
  Rng rng(555);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.uniform_int(3, 5);
    std::vector<InteractionGraph::Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform(0, 1) < 0.6)
          edges.push_back({i, j, rng.uniform(0.5, 2.0)});
    if (edges.empty()) edges.push_back({0, 1, 1.0});
    const InteractionGraph g = InteractionGraph::from_edges(n, edges);
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i)
      pos.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    bool coincident = false;
    for (int i = 0; i < n && !coincident; ++i)
      for (int j = i + 1; j < n; ++j)
        if ((pos[i] - pos[j]).norm() < 1e-3) coincident = true;
    if (coincident) continue;

    for (int i = 0; i < n; ++i) {
      const TaskEvaluation eval = formation_eval(i, pos, g);
      const Vec2 fd = fd_gradient(
          [&](const std::vector<Vec2>& p) {
            return formation_eval(i, p, g).cost;
          },
          pos, i, 1e-6);
      const double scale = std::max(1.0, eval.gradient.norm());
      CHECK((eval.gradient - fd).norm() / scale < 1e-4);

      // local cost never exceeds the global double-sum cost
      CHECK(eval.cost <= formation_global_cost(pos, g) + 1e-12);
    }
  }
}

TEST_CASE("property: coverage gradient matches finite differences") {
  Rng rng(808);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = rng.uniform_int(2, 4);
    std::vector<Vec2> pos;
    while (int(pos.size()) < n) {
      Vec2 cand{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
      bool ok = true;
      for (const Vec2& p : pos)
        if ((p - cand).norm() < 0.15) ok = false;
      if (ok) pos.push_back(cand);
    }
    for (int i = 0; i < n; ++i) {
      const TaskEvaluation eval =
          coverage_eval(i, pos, unit_square(), DensityField::uniform(), 0.0);
      const Vec2 fd = fd_gradient(
          [&](const std::vector<Vec2>& p) {
            return coverage_eval(i, p, unit_square(), DensityField::uniform(),
                                 0.0)
                .cost;
          },
          pos, i, 1e-6);
      const double scale = std::max(1e-3, eval.gradient.norm());
      CHECK((eval.gradient - fd).norm() / scale < 1e-4);
    }
  }
}

TEST_CASE("property: factor-two identity on formation costs") {
  Rng rng(909);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4;
    const InteractionGraph g = InteractionGraph::from_edges(
        n, {{0, 1, 1.0}, {1, 2, 1.3}, {2, 3, 0.8}, {0, 3, 1.1}, {0, 2, 1.7}});
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i)
      pos.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});

    for (int i = 0; i < n; ++i) {
      // dJ/dx_i accumulated edge by edge over the double sum
      Vec2 global_grad{0, 0};
      for (int j : g.neighbors(i)) {
        const Vec2 diff = pos[i] - pos[j];
        const double dist = diff.norm();
        const double w = (dist - g.desired_distance(i, j)) / dist;
        global_grad += 2.0 * w * diff;  // J_ij appears in J_i and in J_j
      }
      const TaskEvaluation eval = formation_eval(i, pos, g);
      CHECK((global_grad - 2.0 * eval.gradient).norm() < 1e-8);
    }
  }
}

TEST_CASE("decentralization: evaluations ignore non-neighbors") {
  // formation: robot 0 only sees robot 1
  const InteractionGraph g =
      InteractionGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  std::vector<Vec2> pos{{0, 0}, {1, 0}, {5, 5}};
  const TaskEvaluation before = formation_eval(0, pos, g);
  pos[2] += Vec2{0.1, -0.3};
  const TaskEvaluation after = formation_eval(0, pos, g);
  CHECK(before.cost == after.cost);
  CHECK(before.gradient == after.gradient);

  // coverage: far robot in a big domain is not a Voronoi neighbor of 0
  ConvexPolygon domain = ConvexPolygon::rectangle({0, 0}, {100, 100});
  std::vector<Vec2> cpos{{1, 1}, {3, 1}, {1, 3}, {90, 90}};
  const auto cells = voronoi_partition(domain, cpos);
  CHECK(cells[0].neighbors == std::vector<int>{1, 2});
  const TaskEvaluation cov_before =
      coverage_eval(0, cpos, domain, DensityField::uniform(), 0.0);
  cpos[3] += Vec2{0.1, 0.05};
  const TaskEvaluation cov_after =
      coverage_eval(0, cpos, domain, DensityField::uniform(), 0.0);
  CHECK(cov_before.cost == cov_after.cost);
  CHECK(cov_before.gradient == cov_after.gradient);
}
