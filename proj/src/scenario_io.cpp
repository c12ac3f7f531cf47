#include "cdmr/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cdmr {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& why) {
  throw_error(ErrorCode::SchemaError, path + ": " + why);
}

double jnum(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  return j.get<double>();
}

int jint(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_fail(path, "expected an integer");
  return j.get<int>();
}

std::string jstr(const json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

Vec2 jvec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [x, y]");
  return {jnum(j[0], path + "[0]"), jnum(j[1], path + "[1]")};
}

std::vector<Vec2> jpoints(const json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected an array of points");
  std::vector<Vec2> pts;
  for (size_t k = 0; k < j.size(); ++k)
    pts.push_back(jvec2(j[k], path + "[" + std::to_string(k) + "]"));
  return pts;
}

ClassKappa parse_alpha(const json& j, const std::string& path) {
  const std::string kind = jstr(j.value("kind", json("cube_root")), path + ".kind");
  if (kind == "cube_root") return ClassKappa::cube_root();
  if (kind == "linear") return ClassKappa::linear(jnum(j.value("c", json(1.0)), path + ".c"));
  if (kind == "signed_power") {
    const double c = jnum(j.value("c", json(1.0)), path + ".c");
    const double gamma = jnum(j.value("gamma", json(1.0 / 3.0)), path + ".gamma");
    try {
      return ClassKappa::signed_power(c, gamma);
    } catch (const Error& e) {
      throw_error(ErrorCode::ValidationError, path + ": " + e.what());
    }
  }
  schema_fail(path + ".kind", "unknown class-K kind '" + kind + "'");
}

json alpha_json(const ClassKappa& alpha) {
  json j;
  if (alpha.kind() == ClassKappa::Kind::Linear) {
    j["kind"] = "linear";
    j["c"] = alpha.gain();
  } else if (alpha.gain() == 1.0 && alpha.exponent() == 1.0 / 3.0) {
    j["kind"] = "cube_root";
  } else {
    j["kind"] = "signed_power";
    j["c"] = alpha.gain();
    j["gamma"] = alpha.exponent();
  }
  return j;
}

DensityField parse_density(const json& j, const std::string& path) {
  const std::string kind = jstr(j.value("kind", json("uniform")), path + ".kind");
  if (kind == "uniform") return DensityField::uniform();
  if (kind == "gaussian_sum") {
    std::vector<DensityField::Gaussian> comps;
    if (!j.contains("components") || !j["components"].is_array())
      schema_fail(path + ".components", "expected an array");
    for (size_t k = 0; k < j["components"].size(); ++k) {
      const json& c = j["components"][k];
      const std::string cpath = path + ".components[" + std::to_string(k) + "]";
      DensityField::Gaussian g;
      g.weight = jnum(c.value("weight", json(1.0)), cpath + ".weight");
      g.sigma = jnum(c.value("sigma", json(0.1)), cpath + ".sigma");
      g.center = jvec2(c.value("center", json::array({0.0, 0.0})), cpath + ".center");
      g.velocity =
          jvec2(c.value("velocity", json::array({0.0, 0.0})), cpath + ".velocity");
      if (c.contains("orbit")) {
        const json& o = c["orbit"];
        g.orbit_radius = jnum(o.value("radius", json(0.0)), cpath + ".orbit.radius");
        g.orbit_omega = jnum(o.value("omega", json(0.0)), cpath + ".orbit.omega");
        g.orbit_phase = jnum(o.value("phase", json(0.0)), cpath + ".orbit.phase");
      }
      if (c.contains("pulse")) {
        const json& pj = c["pulse"];
        g.pulse_amplitude =
            jnum(pj.value("amplitude", json(0.0)), cpath + ".pulse.amplitude");
        g.pulse_omega = jnum(pj.value("omega", json(0.0)), cpath + ".pulse.omega");
      }
      comps.push_back(g);
    }
    const double floor = jnum(j.value("floor", json(0.0)), path + ".floor");
    try {
      return DensityField::gaussian_sum(std::move(comps), floor);
    } catch (const Error& e) {
      throw_error(ErrorCode::ValidationError, path + ": " + e.what());
    }
  }
  if (kind == "grid") {
    const Vec2 origin =
        jvec2(j.value("origin", json::array({0.0, 0.0})), path + ".origin");
    const double dx = jnum(j.value("dx", json(0.1)), path + ".dx");
    const double dy = jnum(j.value("dy", json(0.1)), path + ".dy");
    if (!j.contains("values") || !j["values"].is_array())
      schema_fail(path + ".values", "expected an array of rows");
    const json& rows = j["values"];
    const size_t nr = rows.size();
    if (nr < 2 || !rows[0].is_array())
      schema_fail(path + ".values", "expected >= 2 rows of numbers");
    const size_t nc = rows[0].size();
    Eigen::MatrixXd values(nr, nc);
    for (size_t r = 0; r < nr; ++r) {
      if (!rows[r].is_array() || rows[r].size() != nc)
        schema_fail(path + ".values", "ragged rows");
      for (size_t c = 0; c < nc; ++c)
        values(long(r), long(c)) =
            jnum(rows[r][c], path + ".values[" + std::to_string(r) + "]");
    }
    try {
      return DensityField::grid(origin, dx, dy, std::move(values));
    } catch (const Error& e) {
      throw_error(ErrorCode::ValidationError, path + ": " + e.what());
    }
  }
  schema_fail(path + ".kind", "unknown density kind '" + kind + "'");
}

json density_json(const DensityField& d) {
  json j;
  switch (d.kind()) {
    case DensityField::Kind::Uniform:
      j["kind"] = "uniform";
      break;
    case DensityField::Kind::GaussianSum: {
      j["kind"] = "gaussian_sum";
      j["floor"] = d.floor();
      json comps = json::array();
      for (const DensityField::Gaussian& g : d.components()) {
        json c;
        c["weight"] = g.weight;
        c["sigma"] = g.sigma;
        c["center"] = {g.center.x(), g.center.y()};
        c["velocity"] = {g.velocity.x(), g.velocity.y()};
        if (g.orbit_radius > 0.0) {
          c["orbit"] = {{"radius", g.orbit_radius},
                        {"omega", g.orbit_omega},
                        {"phase", g.orbit_phase}};
        }
        if (g.pulse_amplitude > 0.0) {
          c["pulse"] = {{"amplitude", g.pulse_amplitude},
                        {"omega", g.pulse_omega}};
        }
        comps.push_back(c);
      }
      j["components"] = comps;
      break;
    }
    case DensityField::Kind::Grid:
      // grid densities are file-provided; runs echo them back verbatim is
      // not supported, so reject serialization explicitly
      throw_error(ErrorCode::InvalidArgument,
                  "grid densities cannot be serialized back");
  }
  return j;
}

// deterministic placement for "count"-style robot specs
uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(uint64_t& state) {
  return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::vector<Vec2> place_robots(int count, const Vec2& lo, const Vec2& hi,
                               const ConvexPolygon& domain, uint64_t seed) {
  std::vector<Vec2> out;
  uint64_t state = seed ^ 0xc0ffee1234567890ULL;
  const double min_sep = 0.02 * domain.diameter();
  int attempts = 0;
  while (int(out.size()) < count) {
    if (++attempts > 100000)
      throw_error(ErrorCode::ValidationError,
                  "robots.count: unable to place robots in the box");
    Vec2 cand{lo.x() + uniform01(state) * (hi.x() - lo.x()),
              lo.y() + uniform01(state) * (hi.y() - lo.y())};
    if (!domain.contains(cand, 1e-9)) continue;
    bool ok = true;
    for (const Vec2& p : out)
      if ((p - cand).norm() < min_sep) ok = false;
    if (ok) out.push_back(cand);
  }
  return out;
}

}  // namespace

Scenario parse_scenario_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_error(ErrorCode::SchemaError, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_fail("$", "expected a JSON object");

  Scenario sc;
  sc.name = jstr(j.value("name", json("custom")), "name");
  sc.seed = uint64_t(j.value("seed", 0));

  const std::string task = jstr(j.value("task", json()), "task");
  if (task == "formation") sc.task = TaskKind::Formation;
  else if (task == "coverage") sc.task = TaskKind::Coverage;
  else if (task == "tvd_coverage") sc.task = TaskKind::TvdCoverage;
  else if (task == "consensus") sc.task = TaskKind::Consensus;
  else schema_fail("task", "expected formation|coverage|tvd_coverage|consensus");

  if (j.contains("domain")) {
    try {
      sc.domain = ConvexPolygon::from_points(jpoints(j["domain"], "domain"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaError) throw;
      throw_error(ErrorCode::ValidationError, std::string("domain: ") + e.what());
    }
  } else {
    sc.domain = ConvexPolygon::rectangle({0, 0}, {3, 2});
  }

  if (!j.contains("robots") || !j["robots"].is_object())
    schema_fail("robots", "expected an object");
  const json& robots = j["robots"];
  if (robots.contains("positions")) {
    sc.initial_positions = jpoints(robots["positions"], "robots.positions");
  } else if (robots.contains("count")) {
    const int count = jint(robots["count"], "robots.count");
    if (count < 1) schema_fail("robots.count", "expected >= 1");
    auto [lo, hi] = sc.domain.bounding_box();
    Vec2 blo = lo + 0.05 * (hi - lo), bhi = hi - 0.05 * (hi - lo);
    if (robots.contains("box")) {
      if (!robots["box"].is_array() || robots["box"].size() != 2)
        schema_fail("robots.box", "expected [[x,y],[x,y]]");
      blo = jvec2(robots["box"][0], "robots.box[0]");
      bhi = jvec2(robots["box"][1], "robots.box[1]");
    }
    sc.initial_positions = place_robots(count, blo, bhi, sc.domain, sc.seed);
  } else {
    schema_fail("robots", "need positions or count");
  }
  if (robots.contains("headings")) {
    if (!robots["headings"].is_array())
      schema_fail("robots.headings", "expected an array");
    for (size_t k = 0; k < robots["headings"].size(); ++k)
      sc.initial_headings.push_back(
          jnum(robots["headings"][k], "robots.headings"));
  }

  if (j.contains("graph")) {
    if (!j["graph"].is_object() || !j["graph"].contains("edges"))
      schema_fail("graph", "expected {edges: [[i,j,d],...]}");
    std::vector<InteractionGraph::Edge> edges;
    const json& earr = j["graph"]["edges"];
    if (!earr.is_array()) schema_fail("graph.edges", "expected an array");
    for (size_t k = 0; k < earr.size(); ++k) {
      const std::string epath = "graph.edges[" + std::to_string(k) + "]";
      if (!earr[k].is_array() || earr[k].size() != 3)
        schema_fail(epath, "expected [i, j, d_ij]");
      edges.push_back({jint(earr[k][0], epath), jint(earr[k][1], epath),
                       jnum(earr[k][2], epath)});
    }
    sc.graph = InteractionGraph::from_edges(int(sc.initial_positions.size()),
                                            std::move(edges));
  } else {
    sc.graph =
        InteractionGraph::from_edges(int(sc.initial_positions.size()), {});
  }

  if (j.contains("density"))
    sc.density = parse_density(j["density"], "density");
  if (j.contains("alpha")) sc.alpha_task = parse_alpha(j["alpha"], "alpha");
  if (j.contains("alpha_hard"))
    sc.alpha_hard = parse_alpha(j["alpha_hard"], "alpha_hard");

  if (j.contains("survivability")) {
    const json& s = j["survivability"];
    if (!s.is_object()) schema_fail("survivability", "expected an object");
    SurvivabilitySpec& spec = sc.survivability;
    spec.enabled = true;
    spec.k = jnum(s.value("k", json(0.02)), "survivability.k");
    spec.d_chg = jnum(s.value("d_chg", json(0.15)), "survivability.d_chg");
    if (s.contains("stations"))
      spec.stations = jpoints(s["stations"], "survivability.stations");
    if (s.contains("battery")) {
      const json& b = s["battery"];
      spec.battery.e_min =
          jnum(b.value("e_min", json(0.5)), "survivability.battery.e_min");
      spec.battery.e_chg =
          jnum(b.value("e_chg", json(0.95)), "survivability.battery.e_chg");
      spec.battery.drain_rate = jnum(b.value("drain_rate", json(0.01)),
                                     "survivability.battery.drain_rate");
      spec.battery.charge_rate = jnum(b.value("charge_rate", json(0.05)),
                                      "survivability.battery.charge_rate");
      spec.battery.energy = spec.battery.e_chg;
      if (b.contains("initial")) {
        if (b["initial"].is_array()) {
          for (size_t k = 0; k < b["initial"].size(); ++k)
            spec.initial_energy.push_back(
                jnum(b["initial"][k], "survivability.battery.initial"));
        } else {
          spec.initial_energy.assign(
              sc.initial_positions.size(),
              jnum(b["initial"], "survivability.battery.initial"));
        }
      }
    }
    if (spec.initial_energy.empty())
      spec.initial_energy.assign(sc.initial_positions.size(),
                                 spec.battery.e_chg);
    if (s.contains("obstacles")) {
      const json& oarr = s["obstacles"];
      if (!oarr.is_array())
        schema_fail("survivability.obstacles", "expected an array");
      for (size_t k = 0; k < oarr.size(); ++k) {
        const std::string opath =
            "survivability.obstacles[" + std::to_string(k) + "]";
        const json& o = oarr[k];
        Obstacle obstacle;
        if (!o.contains("waypoints"))
          schema_fail(opath + ".waypoints", "required");
        obstacle.waypoints = jpoints(o["waypoints"], opath + ".waypoints");
        obstacle.speed = jnum(o.value("speed", json(0.0)), opath + ".speed");
        obstacle.clearance =
            jnum(o.value("clearance", json(0.2)), opath + ".clearance");
        spec.obstacles.push_back(std::move(obstacle));
      }
    }
  }

  sc.dt = jnum(j.value("dt", json(0.01)), "dt");
  sc.horizon = jnum(j.value("horizon", json(60.0)), "horizon");
  sc.settle_tol = jnum(j.value("settle_tol", json(1e-4)), "settle_tol");
  sc.slack_weight = jnum(j.value("slack_weight", json(1.0)), "slack_weight");
  sc.sensing_radius =
      jnum(j.value("sensing_radius", json(1e9)), "sensing_radius");
  sc.quadrature_resolution =
      jint(j.value("quadrature_resolution", 128), "quadrature_resolution");
  const std::string mode =
      jstr(j.value("mode", json("single_integrator")), "mode");
  if (mode == "single_integrator") sc.mode = DynamicsMode::SingleIntegrator;
  else if (mode == "unicycle") sc.mode = DynamicsMode::Unicycle;
  else schema_fail("mode", "expected single_integrator|unicycle");
  sc.unicycle_offset =
      jnum(j.value("unicycle_offset", json(0.1)), "unicycle_offset");

  sc.validate();
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw_error(ErrorCode::IoError, "cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_json(buffer.str());
}

std::string serialize_scenario(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  switch (sc.task) {
    case TaskKind::Formation: j["task"] = "formation"; break;
    case TaskKind::Coverage: j["task"] = "coverage"; break;
    case TaskKind::TvdCoverage: j["task"] = "tvd_coverage"; break;
    case TaskKind::Consensus: j["task"] = "consensus"; break;
  }
  j["seed"] = sc.seed;
  json domain = json::array();
  for (const Vec2& v : sc.domain.vertices())
    domain.push_back({v.x(), v.y()});
  j["domain"] = domain;
  json positions = json::array();
  for (const Vec2& v : sc.initial_positions)
    positions.push_back({v.x(), v.y()});
  j["robots"]["positions"] = positions;
  if (!sc.initial_headings.empty()) j["robots"]["headings"] = sc.initial_headings;
  if (!sc.graph.edges().empty()) {
    json edges = json::array();
    for (const InteractionGraph::Edge& e : sc.graph.edges())
      edges.push_back({e.i, e.j, e.desired_distance});
    j["graph"]["edges"] = edges;
  }
  j["density"] = density_json(sc.density);
  j["alpha"] = alpha_json(sc.alpha_task);
  j["alpha_hard"] = alpha_json(sc.alpha_hard);
  if (sc.survivability.enabled) {
    const SurvivabilitySpec& s = sc.survivability;
    json sj;
    sj["k"] = s.k;
    sj["d_chg"] = s.d_chg;
    json stations = json::array();
    for (const Vec2& v : s.stations) stations.push_back({v.x(), v.y()});
    sj["stations"] = stations;
    sj["battery"] = {{"e_min", s.battery.e_min},
                     {"e_chg", s.battery.e_chg},
                     {"drain_rate", s.battery.drain_rate},
                     {"charge_rate", s.battery.charge_rate},
                     {"initial", s.initial_energy}};
    json obstacles = json::array();
    for (const Obstacle& o : s.obstacles) {
      json oj;
      json wps = json::array();
      for (const Vec2& v : o.waypoints) wps.push_back({v.x(), v.y()});
      oj["waypoints"] = wps;
      oj["speed"] = o.speed;
      oj["clearance"] = o.clearance;
      obstacles.push_back(oj);
    }
    sj["obstacles"] = obstacles;
    j["survivability"] = sj;
  }
  j["dt"] = sc.dt;
  j["horizon"] = sc.horizon;
  j["settle_tol"] = sc.settle_tol;
  j["slack_weight"] = sc.slack_weight;
  j["sensing_radius"] = sc.sensing_radius;
  j["quadrature_resolution"] = sc.quadrature_resolution;
  j["mode"] = sc.mode == DynamicsMode::SingleIntegrator ? "single_integrator"
                                                        : "unicycle";
  j["unicycle_offset"] = sc.unicycle_offset;
  return j.dump(2);
}

std::vector<std::string> preset_names() {
  return {"hexagon-formation", "coverage-6", "persistence-6x2", "tvd-gaussian"};
}

Scenario make_preset(const std::string& name) {
  Scenario sc;
  sc.name = name;
  if (name == "hexagon-formation") {
    sc.task = TaskKind::Formation;
    sc.domain = ConvexPolygon::rectangle({-6, -6}, {6, 6});
    // regular hexagon, unit side (circumradius 1), scaled start
    std::vector<Vec2> hexagon;
    for (int k = 0; k < 6; ++k) {
      const double a = M_PI / 3.0 * k;
      hexagon.push_back({std::cos(a), std::sin(a)});
    }
    const double start_scale = 3.5;
    for (const Vec2& v : hexagon) sc.initial_positions.push_back(start_scale * v);
    // 6 unit sides + 3 alternating sqrt(3) diagonals: minimally rigid
    const double s3 = std::sqrt(3.0);
    sc.graph = InteractionGraph::from_edges(
        6, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 5, 1.0},
            {5, 0, 1.0}, {0, 2, s3}, {2, 4, s3}, {4, 0, s3}});
    sc.alpha_task = ClassKappa::cube_root();
    sc.dt = 0.01;
    sc.horizon = 40.0;
    sc.settle_tol = 1e-4;
  } else if (name == "coverage-6") {
    sc.task = TaskKind::Coverage;
    sc.domain = ConvexPolygon::rectangle({0, 0}, {3, 2});
    sc.initial_positions = {{0.82, 0.42}, {1.75, 0.68}, {2.28, 0.44},
                            {0.64, 1.52}, {1.42, 1.32}, {2.52, 1.61}};
    sc.alpha_task = ClassKappa::signed_power(6.0, 0.08);
    sc.dt = 0.01;
    sc.horizon = 60.0;
  } else if (name == "persistence-6x2") {
    sc.task = TaskKind::Coverage;
    sc.domain = ConvexPolygon::rectangle({0, 0}, {3, 2});
    sc.initial_positions = {{0.82, 0.42}, {1.75, 0.68}, {2.28, 0.44},
                            {0.64, 1.52}, {1.42, 1.32}, {2.52, 1.61}};
    sc.alpha_task = ClassKappa::signed_power(3.0, 0.15);
    sc.alpha_hard = ClassKappa::linear(1.0);
    sc.dt = 0.01;
    sc.horizon = 160.0;
    sc.sensing_radius = 1.0;
    SurvivabilitySpec& s = sc.survivability;
    s.enabled = true;
    s.k = 0.02;
    s.d_chg = 0.15;
    for (int i = 0; i < 6; ++i)
      s.stations.push_back({0.15, 0.2 + 0.3 * i});
    s.battery.e_min = 0.5;
    s.battery.e_chg = 0.95;
    s.battery.drain_rate = 0.01;
    s.battery.charge_rate = 0.05;
    s.initial_energy = {0.95, 0.89, 0.83, 0.77, 0.71, 0.65};
    Obstacle o1;
    o1.waypoints = {{1.2, 0.5}, {2.6, 0.5}, {2.6, 1.5}, {1.2, 1.5}};
    o1.speed = 0.15;
    o1.clearance = 0.2;
    Obstacle o2;
    o2.waypoints = {{1.0, 1.6}, {1.0, 0.4}, {2.4, 0.4}, {2.4, 1.6}};
    o2.speed = 0.12;
    o2.clearance = 0.2;
    s.obstacles = {o1, o2};
  } else if (name == "tvd-gaussian") {
    sc.task = TaskKind::TvdCoverage;
    sc.domain = ConvexPolygon::rectangle({0, 0}, {2, 2});
    sc.initial_positions = {{0.5, 0.5}, {1.5, 0.5}, {0.5, 1.5},
                            {1.5, 1.5}, {1.0, 0.75}, {1.0, 1.25}};
    DensityField::Gaussian g;
    g.weight = 1.0;
    g.sigma = 0.3;
    g.center = {1.0, 1.0};
    g.orbit_radius = 0.5;
    g.orbit_omega = 2.0 * M_PI / 30.0;
    g.orbit_phase = 0.0;
    sc.density = DensityField::gaussian_sum({g}, 0.05);
    sc.alpha_task = ClassKappa::linear(5.0);
    sc.slack_weight = 1e6;
    sc.dt = 0.02;
    sc.horizon = 36.0;
    sc.quadrature_resolution = 64;
  } else {
    throw_error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
  }
  sc.validate();
  return sc;
}

}  // namespace cdmr
