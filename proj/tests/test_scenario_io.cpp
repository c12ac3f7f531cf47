#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cdmr/outputs.hpp"
#include "cdmr/scenario_io.hpp"
#include "cdmr/sim.hpp"

using namespace cdmr;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("minimal consensus file materializes the documented defaults") {
  const Scenario sc = parse_scenario_json(
      R"({"task": "consensus", "robots": {"count": 4}, "seed": 7})");
  CHECK(sc.task == TaskKind::Consensus);
  CHECK(sc.robot_count() == 4);
  CHECK(sc.dt == 0.01);
  CHECK(sc.horizon == 60.0);
  CHECK(sc.settle_tol == 1e-4);
  CHECK(sc.slack_weight == 1.0);
  // default alpha: signed power c=1, gamma=1/3 (the cube root)
  CHECK(sc.alpha_task.kind() == ClassKappa::Kind::SignedPower);
  CHECK(sc.alpha_task.gain() == 1.0);
  CHECK(sc.alpha_task.exponent() == doctest::Approx(1.0 / 3.0));
  // hard rows default to the identity
  CHECK(sc.alpha_hard.kind() == ClassKappa::Kind::Linear);
  CHECK(sc.alpha_hard.gain() == 1.0);
  // robots placed inside the default domain, pairwise distinct
  for (const Vec2& p : sc.initial_positions) CHECK(sc.domain.contains(p));
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = i + 1; j < 4; ++j)
      CHECK((sc.initial_positions[i] - sc.initial_positions[j]).norm() > 1e-4);

  // same seed, same placements
  const Scenario again = parse_scenario_json(
      R"({"task": "consensus", "robots": {"count": 4}, "seed": 7})");
  for (int i = 0; i < 4; ++i)
    CHECK(sc.initial_positions[i] == again.initial_positions[i]);
}

TEST_CASE("asymmetric distance table is a validation error") {
  try {
    parse_scenario_json(R"({
      "task": "formation",
      "robots": {"positions": [[0,0],[1,0]]},
      "domain": [[-2,-2],[2,-2],[2,2],[-2,2]],
      "graph": {"edges": [[0,1,1.0],[1,0,2.0]]}
    })");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("schema errors carry field paths") {
  try {
    parse_scenario_json(R"({"task": "flocking", "robots": {"count": 2}})");
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("task") != std::string::npos);
  }
  try {
    parse_scenario_json(R"({"task": "consensus"})");
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("robots") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario_json("not json"), Error);
}

TEST_CASE("alpha exponent outside (0,1) is a validation error") {
  try {
    parse_scenario_json(R"({"task": "consensus", "robots": {"count": 2},
                            "alpha": {"kind": "signed_power", "c": 1.0,
                                      "gamma": 1.5}})");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
  // pulsation amplitude must keep the field nonnegative
  try {
    parse_scenario_json(R"({"task": "coverage", "robots": {"count": 2},
                            "density": {"kind": "gaussian_sum",
                              "components": [{"weight": 1.0, "sigma": 0.2,
                                "center": [1,1],
                                "pulse": {"amplitude": 1.5, "omega": 1.0}}]}})");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("stations outside the domain are rejected with their index") {
  try {
    parse_scenario_json(R"({
      "task": "coverage",
      "robots": {"positions": [[0.5,0.5]]},
      "domain": [[0,0],[1,0],[1,1],[0,1]],
      "survivability": {"stations": [[5.0,5.0]],
                        "battery": {"initial": 0.9}}
    })");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("stations[0]") != std::string::npos);
  }
}

TEST_CASE("hexagon preset: 6 robots, 9 edges, hexagon chord lengths") {
  const Scenario sc = make_preset("hexagon-formation");
  CHECK(sc.robot_count() == 6);
  REQUIRE(sc.graph.edges().size() == 9);
  int unit_edges = 0, diag_edges = 0;
  for (const InteractionGraph::Edge& e : sc.graph.edges()) {
    if (std::abs(e.desired_distance - 1.0) < 1e-12) ++unit_edges;
    if (std::abs(e.desired_distance - std::sqrt(3.0)) < 1e-12) ++diag_edges;
  }
  CHECK(unit_edges == 6);
  CHECK(diag_edges == 3);

  // the desired distances are realized exactly by a unit hexagon
  std::vector<Vec2> hexagon;
  for (int k = 0; k < 6; ++k)
    hexagon.push_back({std::cos(M_PI / 3 * k), std::sin(M_PI / 3 * k)});
  for (const InteractionGraph::Edge& e : sc.graph.edges())
    CHECK((hexagon[e.i] - hexagon[e.j]).norm() ==
          doctest::Approx(e.desired_distance));

  // minimally rigid at the target: rigidity matrix rank 2N-3 = 9
  Eigen::MatrixXd rigidity(9, 12);
  rigidity.setZero();
  for (size_t r = 0; r < sc.graph.edges().size(); ++r) {
    const auto& e = sc.graph.edges()[r];
    const Vec2 d = hexagon[e.i] - hexagon[e.j];
    rigidity.block<1, 2>(r, 2 * e.i) = d.transpose();
    rigidity.block<1, 2>(r, 2 * e.j) = -d.transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rigidity);
  CHECK(lu.rank() == 9);
}

TEST_CASE("all presets parse, validate and round-trip") {
  for (const std::string& name : preset_names()) {
    const Scenario sc = make_preset(name);
    const std::string once = serialize_scenario(sc);
    const Scenario reparsed = parse_scenario_json(once);
    const std::string twice = serialize_scenario(reparsed);
    CHECK(once == twice);
    CHECK(reparsed.name == sc.name);
    CHECK(reparsed.robot_count() == sc.robot_count());
  }
  CHECK_THROWS_AS(make_preset("no-such-preset"), Error);
}

TEST_CASE("parse -> serialize -> parse is identity on a custom scenario") {
  const std::string text = R"({
    "task": "formation",
    "name": "triangle",
    "seed": 3,
    "domain": [[-3,-3],[3,-3],[3,3],[-3,3]],
    "robots": {"positions": [[-1,0],[1,0],[0,1.2]]},
    "graph": {"edges": [[0,1,1.0],[1,2,1.0],[0,2,1.0]]},
    "alpha": {"kind": "signed_power", "c": 2.0, "gamma": 0.5},
    "dt": 0.02,
    "horizon": 10.0
  })";
  const Scenario sc = parse_scenario_json(text);
  const std::string s1 = serialize_scenario(sc);
  const std::string s2 = serialize_scenario(parse_scenario_json(s1));
  CHECK(s1 == s2);
}

TEST_CASE("metrics CSV: header-only for a zero-step run, stable bytes") {
  Scenario sc = make_preset("coverage-6");
  sc.horizon = 0.0;
  const RunMetrics metrics = run(sc);
  const auto tmp = std::filesystem::temp_directory_path() / "cdmr_csv_test";
  std::filesystem::create_directories(tmp);
  const std::string path = (tmp / "zero.csv").string();
  write_metrics_csv(sc, metrics, path);
  const std::string content = slurp(path);
  // two header comment lines + the column header, no data rows
  CHECK(content.find("# cdmr metrics v1") == 0);
  CHECK(content.find("t,J,J_0") != std::string::npos);
  int newlines = 0;
  for (char c : content)
    if (c == '\n') ++newlines;
  CHECK(newlines == 3);

  // identical runs produce identical bytes
  sc.horizon = 0.5;
  const RunMetrics m1 = run(sc);
  const RunMetrics m2 = run(sc);
  const std::string p1 = (tmp / "a.csv").string();
  const std::string p2 = (tmp / "b.csv").string();
  write_metrics_csv(sc, m1, p1);
  write_metrics_csv(sc, m2, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("SVG outputs contain the documented elements") {
  Scenario sc = make_preset("persistence-6x2");
  sc.horizon = 1.0;
  const RunMetrics metrics = run(sc, false, /*frames_stride=*/50);
  REQUIRE(!metrics.frames.empty());

  const auto tmp = std::filesystem::temp_directory_path() / "cdmr_svg_test";
  std::filesystem::remove_all(tmp);
  write_frames_svg(sc, metrics, tmp.string());
  const std::string frame = slurp((tmp / "frame_000000.svg").string());
  CHECK(frame.find("<svg") != std::string::npos);
  CHECK(frame.find("<polygon") != std::string::npos);  // domain + cells
  // 6 robots + 6 stations + 2 obstacle markers + clearance circles
  size_t circles = 0;
  for (size_t at = frame.find("<circle"); at != std::string::npos;
       at = frame.find("<circle", at + 1))
    ++circles;
  CHECK(circles >= 14);

  const std::string chart_path = (tmp / "energy.svg").string();
  write_energy_chart_svg(sc, metrics, chart_path);
  const std::string chart = slurp(chart_path);
  CHECK(chart.find("E_min") != std::string::npos);
  CHECK(chart.find("E_chg") != std::string::npos);
  size_t polylines = 0;
  for (size_t at = chart.find("<polyline"); at != std::string::npos;
       at = chart.find("<polyline", at + 1))
    ++polylines;
  CHECK(polylines == 6);
}
