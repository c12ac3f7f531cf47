#ifndef CDMR_OUTPUTS_HPP
#define CDMR_OUTPUTS_HPP

#include <string>

#include "cdmr/sim.hpp"

namespace cdmr {

/// Metrics CSV: '#'-prefixed header lines embedding the effective
/// configuration, a column header row, then one row per step. Column
/// order is documented in the README; identical headers produce
/// byte-identical files.
void write_metrics_csv(const Scenario& scenario, const RunMetrics& metrics,
                       const std::string& path);

/// One frame_NNNNNN.svg per recorded snapshot into `dir`: domain, robots,
/// Voronoi cells and centroids (coverage tasks), graph edges (formation
/// and consensus), charging stations colored by charging state, obstacles
/// with their clearance circles.
void write_frames_svg(const Scenario& scenario, const RunMetrics& metrics,
                      const std::string& dir);

/// Energy-vs-time chart with e_min / e_chg rules.
void write_energy_chart_svg(const Scenario& scenario, const RunMetrics& metrics,
                            const std::string& path);

}  // namespace cdmr

#endif  // CDMR_OUTPUTS_HPP
