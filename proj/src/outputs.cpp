#include "cdmr/outputs.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdmr/scenario_io.hpp"

namespace cdmr {

namespace {

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#bcbd22", "#9467bd",
                          "#ff7f0e", "#17becf", "#e377c2", "#8c564b"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct SvgCanvas {
  std::ostringstream body;
  double min_x, min_y, max_x, max_y;  // world box
  double scale;                       // pixels per meter
  double width, height;

  SvgCanvas(const Vec2& lo, const Vec2& hi, double margin, double px_width) {
    min_x = lo.x() - margin;
    min_y = lo.y() - margin;
    max_x = hi.x() + margin;
    max_y = hi.y() + margin;
    scale = px_width / (max_x - min_x);
    width = px_width;
    height = (max_y - min_y) * scale;
  }

  double px(double x) const { return (x - min_x) * scale; }
  double py(double y) const { return (max_y - y) * scale; }  // y points up

  void polygon(const ConvexPolygon& poly, const std::string& style) {
    if (poly.empty()) return;
    body << "<polygon points=\"";
    for (const Vec2& v : poly.vertices())
      body << fmt_short(px(v.x())) << "," << fmt_short(py(v.y())) << " ";
    body << "\" style=\"" << style << "\"/>\n";
  }

  void line(const Vec2& a, const Vec2& b, const std::string& style) {
    body << "<line x1=\"" << fmt_short(px(a.x())) << "\" y1=\""
         << fmt_short(py(a.y())) << "\" x2=\"" << fmt_short(px(b.x()))
         << "\" y2=\"" << fmt_short(py(b.y())) << "\" style=\"" << style
         << "\"/>\n";
  }

  void circle(const Vec2& c, double world_r, const std::string& style) {
    body << "<circle cx=\"" << fmt_short(px(c.x())) << "\" cy=\""
         << fmt_short(py(c.y())) << "\" r=\"" << fmt_short(world_r * scale)
         << "\" style=\"" << style << "\"/>\n";
  }

  void text(double x_px, double y_px, const std::string& content) {
    body << "<text x=\"" << fmt_short(x_px) << "\" y=\"" << fmt_short(y_px)
         << "\" font-size=\"11\" font-family=\"sans-serif\">" << content
         << "</text>\n";
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "width=\"" << fmt_short(width) << "\" height=\"" << fmt_short(height)
        << "\" viewBox=\"0 0 " << fmt_short(width) << " " << fmt_short(height)
        << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }
};

}  // namespace

void write_metrics_csv(const Scenario& scenario, const RunMetrics& metrics,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  const int n = scenario.robot_count();
  const bool surv = scenario.survivability.enabled;
  const bool obstacles = !scenario.survivability.obstacles.empty();

  // run header: the full effective configuration, one line
  std::string config = serialize_scenario(scenario);
  for (char& c : config)
    if (c == '\n') c = ' ';
  out << "# cdmr metrics v1\n";
  out << "# config: " << config << "\n";

  out << "t,J";
  for (int i = 0; i < n; ++i) out << ",J_" << i;
  for (int i = 0; i < n; ++i) out << ",delta_" << i;
  if (surv) out << ",min_h_energy";
  if (obstacles) out << ",min_h_obstacle,min_obstacle_clearance";
  if (surv)
    for (int i = 0; i < n; ++i) out << ",E_" << i;
  out << ",kkt_max,witness_lhs,witness_rhs,witness_valid\n";

  for (const MetricsRow& row : metrics.rows) {
    out << fmt(row.t) << "," << fmt(row.global_cost);
    for (int i = 0; i < n; ++i) out << "," << fmt(row.robot_cost[i]);
    for (int i = 0; i < n; ++i) out << "," << fmt(row.robot_slack[i]);
    if (surv) out << "," << fmt(row.min_h_energy);
    if (obstacles)
      out << "," << fmt(row.min_h_obstacle) << ","
          << fmt(row.min_obstacle_clearance);
    if (surv)
      for (int i = 0; i < n; ++i) out << "," << fmt(row.robot_energy[i]);
    double kkt_max = 0.0;
    for (int i = 0; i < n; ++i) kkt_max = std::max(kkt_max, row.robot_kkt[i]);
    out << "," << fmt(kkt_max) << "," << fmt(row.witness_lhs) << ","
        << fmt(row.witness_rhs) << "," << (row.witness_valid ? 1 : 0) << "\n";
  }
}

void write_frames_svg(const Scenario& scenario, const RunMetrics& metrics,
                      const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_error(ErrorCode::IoError, "cannot create " + dir);

  const auto [lo, hi] = scenario.domain.bounding_box();
  const double margin = 0.05 * (hi - lo).norm();

  for (size_t f = 0; f < metrics.frames.size(); ++f) {
    const WorldSnapshot& snap = metrics.frames[f];
    SvgCanvas canvas(lo, hi, margin, 640.0);
    canvas.polygon(scenario.domain, "fill:white;stroke:black;stroke-width:1.5");

    // Voronoi cells and centroids for coverage tasks
    if (scenario.coverage_task() && !snap.partition.empty()) {
      std::vector<Vec2> positions(snap.robots.size());
      for (size_t i = 0; i < snap.robots.size(); ++i)
        positions[i] = snap.robots[i].position;
      std::vector<VoronoiCell> cells = snap.partition;
      if (scenario.density.kind() != DensityField::Kind::Uniform)
        cells = weighted_partition(scenario.domain, positions, scenario.density,
                                   snap.time, scenario.quadrature_resolution);
      for (const VoronoiCell& cell : cells) {
        canvas.polygon(cell.polygon, "fill:none;stroke:#999;stroke-width:0.8");
        canvas.circle(cell.centroid, 0.012 * (hi - lo).norm(),
                      "fill:#888;stroke:none");
      }
    }

    // maintained graph edges
    if (scenario.task == TaskKind::Formation ||
        scenario.task == TaskKind::Consensus) {
      for (const InteractionGraph::Edge& e : snap.graph.edges())
        canvas.line(snap.robots[e.i].position, snap.robots[e.j].position,
                    "stroke:black;stroke-width:1");
    }

    // charging stations, yellow while charging
    if (scenario.survivability.enabled) {
      for (size_t i = 0; i < scenario.survivability.stations.size(); ++i) {
        const Vec2& station = scenario.survivability.stations[i];
        const bool charging =
            i < snap.robots.size() &&
            (snap.robots[i].position - station).norm() <=
                scenario.survivability.d_chg &&
            snap.robots[i].battery.energy < snap.robots[i].battery.e_chg;
        canvas.circle(station, scenario.survivability.d_chg,
                      charging ? "fill:#f5d76e;stroke:#9a8117;stroke-width:1"
                               : "fill:#7eb3e0;stroke:#2c5f8a;stroke-width:1");
      }
    }

    // obstacles with clearance circles
    for (size_t o = 0; o < snap.obstacle_positions.size(); ++o) {
      const Obstacle& spec = scenario.survivability.obstacles[o];
      canvas.circle(snap.obstacle_positions[o], spec.clearance,
                    "fill:none;stroke:#cc2222;stroke-width:1;"
                    "stroke-dasharray:4 3");
      canvas.circle(snap.obstacle_positions[o], 0.35 * spec.clearance,
                    "fill:#cc2222;stroke:none");
    }

    for (size_t i = 0; i < snap.robots.size(); ++i)
      canvas.circle(snap.robots[i].position, 0.018 * (hi - lo).norm(),
                    std::string("fill:") + kPalette[i % 8] +
                        ";stroke:black;stroke-width:0.7");

    canvas.text(8, 16, "t = " + fmt_short(snap.time) + " s");

    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.svg", f);
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw_error(ErrorCode::IoError, "cannot write frame " + dir);
    out << canvas.finish();
  }
}

void write_energy_chart_svg(const Scenario& scenario, const RunMetrics& metrics,
                            const std::string& path) {
  if (!scenario.survivability.enabled)
    throw_error(ErrorCode::InvalidArgument,
                "energy chart needs a survivability scenario");
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);

  const double width = 720, height = 300;
  const double mleft = 46, mright = 12, mtop = 12, mbottom = 30;
  const double t_max =
      metrics.rows.empty() ? 1.0 : metrics.rows.back().t + scenario.dt;
  const double e_max = scenario.survivability.battery.e_chg * 1.08;
  auto px = [&](double t) {
    return mleft + t / t_max * (width - mleft - mright);
  };
  auto py = [&](double e) {
    return height - mbottom - e / e_max * (height - mtop - mbottom);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << width << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << mleft << "\" y1=\"" << py(0) << "\" x2=\""
      << width - mright << "\" y2=\"" << py(0)
      << "\" style=\"stroke:#444;stroke-width:1\"/>\n";
  out << "<line x1=\"" << mleft << "\" y1=\"" << py(0) << "\" x2=\"" << mleft
      << "\" y2=\"" << mtop << "\" style=\"stroke:#444;stroke-width:1\"/>\n";

  // E_min and E_chg rules
  for (double level : {scenario.survivability.battery.e_min,
                       scenario.survivability.battery.e_chg}) {
    out << "<line x1=\"" << mleft << "\" y1=\"" << py(level) << "\" x2=\""
        << width - mright << "\" y2=\"" << py(level)
        << "\" style=\"stroke:black;stroke-width:2\"/>\n";
  }
  out << "<text x=\"4\" y=\"" << py(scenario.survivability.battery.e_min) + 4
      << "\" font-size=\"11\" font-family=\"sans-serif\">E_min</text>\n";
  out << "<text x=\"4\" y=\"" << py(scenario.survivability.battery.e_chg) + 4
      << "\" font-size=\"11\" font-family=\"sans-serif\">E_chg</text>\n";
  out << "<text x=\"" << (width / 2 - 16) << "\" y=\"" << (height - 8)
      << "\" font-size=\"11\" font-family=\"sans-serif\">t [s]</text>\n";

  const int n = scenario.robot_count();
  const size_t stride = std::max<size_t>(1, metrics.rows.size() / 2000);
  for (int i = 0; i < n; ++i) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 8]
        << "\" stroke-width=\"1.2\" points=\"";
    for (size_t k = 0; k < metrics.rows.size(); k += stride) {
      const MetricsRow& row = metrics.rows[k];
      out << fmt_short(px(row.t)) << "," << fmt_short(py(row.robot_energy[i]))
          << " ";
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace cdmr
