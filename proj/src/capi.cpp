#include "cdmr.h"

#include <cmath>
#include <cstring>
#include <string>

#include "cdmr/outputs.hpp"
#include "cdmr/scenario_io.hpp"
#include "cdmr/sim.hpp"

struct cdmr_scenario {
  cdmr::Scenario scenario;
};

struct cdmr_run {
  cdmr::Scenario scenario;
  cdmr::RunMetrics metrics;
};

namespace {

thread_local std::string g_last_error;

cdmr_status map_code(cdmr::ErrorCode code) {
  using cdmr::ErrorCode;
  switch (code) {
    case ErrorCode::SchemaError:
    case ErrorCode::ValidationError:
    case ErrorCode::VerificationFailed:
      return CDMR_ERR_VALIDATION;
    case ErrorCode::Infeasible:
      return CDMR_ERR_INFEASIBLE;
    case ErrorCode::NumericallyIllConditioned:
    case ErrorCode::SingularJacobian:
    case ErrorCode::ZeroMass:
    case ErrorCode::CoincidentGenerators:
    case ErrorCode::CoincidentNeighbors:
    case ErrorCode::NegativeCost:
      return CDMR_ERR_NUMERIC;
    case ErrorCode::IoError:
      return CDMR_ERR_IO;
    case ErrorCode::InvalidArgument:
      return CDMR_ERR_INVALID_ARG;
  }
  return CDMR_ERR_INTERNAL;
}

template <typename Fn>
cdmr_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const cdmr::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CDMR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CDMR_ERR_INTERNAL;
  }
}

cdmr_status fail_arg(const char* why) {
  g_last_error = why;
  return CDMR_ERR_INVALID_ARG;
}

}  // namespace

extern "C" {

const char* cdmr_last_error(void) { return g_last_error.c_str(); }

cdmr_status cdmr_scenario_from_file(const char* path, cdmr_scenario** out) {
  if (!path || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new cdmr_scenario{cdmr::parse_scenario_file(path)};
    return CDMR_OK;
  });
}

cdmr_status cdmr_scenario_from_json(const char* json_text,
                                    cdmr_scenario** out) {
  if (!json_text || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new cdmr_scenario{cdmr::parse_scenario_json(json_text)};
    return CDMR_OK;
  });
}

cdmr_status cdmr_scenario_preset(const char* name, cdmr_scenario** out) {
  if (!name || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new cdmr_scenario{cdmr::make_preset(name)};
    return CDMR_OK;
  });
}

void cdmr_scenario_free(cdmr_scenario* scenario) { delete scenario; }

size_t cdmr_preset_count(void) { return cdmr::preset_names().size(); }

const char* cdmr_preset_name(size_t index) {
  static const std::vector<std::string> names = cdmr::preset_names();
  if (index >= names.size()) return nullptr;
  return names[index].c_str();
}

cdmr_status cdmr_scenario_to_json(const cdmr_scenario* scenario, char* buf,
                                  size_t cap, size_t* written) {
  if (!scenario || !buf) return fail_arg("null argument");
  return guarded([&]() -> cdmr_status {
    const std::string text = cdmr::serialize_scenario(scenario->scenario);
    if (written) *written = text.size();
    if (cap < text.size() + 1) return fail_arg("buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return CDMR_OK;
  });
}

size_t cdmr_scenario_robot_count(const cdmr_scenario* scenario) {
  return scenario ? size_t(scenario->scenario.robot_count()) : 0;
}

cdmr_status cdmr_run_execute(const cdmr_scenario* scenario, int verify,
                             int frames_stride, cdmr_run** out) {
  if (!scenario || !out) return fail_arg("null argument");
  if (frames_stride < 0) return fail_arg("frames_stride must be >= 0");
  return guarded([&] {
    auto* handle = new cdmr_run{scenario->scenario, {}};
    try {
      handle->metrics =
          cdmr::run(scenario->scenario, verify != 0, frames_stride);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
    return CDMR_OK;
  });
}

void cdmr_run_free(cdmr_run* run) { delete run; }

size_t cdmr_run_step_count(const cdmr_run* run) {
  return run ? run->metrics.rows.size() : 0;
}

double cdmr_run_settling_time(const cdmr_run* run) {
  return run ? run->metrics.settling_time
             : std::numeric_limits<double>::quiet_NaN();
}

cdmr_status cdmr_run_charge_cycles(const cdmr_run* run, size_t robot,
                                   int* out) {
  if (!run || !out) return fail_arg("null argument");
  if (robot >= size_t(run->scenario.robot_count()))
    return fail_arg("robot index out of range");
  g_last_error.clear();
  *out = robot < run->metrics.charge_cycles.size()
             ? run->metrics.charge_cycles[robot]
             : 0;
  return CDMR_OK;
}

double cdmr_run_min_energy(const cdmr_run* run) {
  return run ? run->metrics.min_energy
             : std::numeric_limits<double>::quiet_NaN();
}

double cdmr_run_min_obstacle_distance(const cdmr_run* run) {
  return run ? run->metrics.min_obstacle_distance
             : std::numeric_limits<double>::quiet_NaN();
}

double cdmr_run_eps_energy(const cdmr_run* run) {
  return run ? run->metrics.eps_energy
             : std::numeric_limits<double>::quiet_NaN();
}

double cdmr_run_eps_obstacle_dist(const cdmr_run* run) {
  return run ? run->metrics.eps_obstacle_dist
             : std::numeric_limits<double>::quiet_NaN();
}

cdmr_status cdmr_run_series(const cdmr_run* run, const char* name,
                            size_t robot, double* out, size_t cap,
                            size_t* len) {
  if (!run || !name || !out || !len) return fail_arg("null argument");
  g_last_error.clear();
  const std::string key = name;
  const auto& rows = run->metrics.rows;
  const size_t n = rows.size();
  *len = n;
  const size_t m = std::min(cap, n);
  const bool per_robot = key == "J_i" || key == "delta_i" || key == "E_i";
  if (per_robot && robot >= size_t(run->scenario.robot_count()))
    return fail_arg("robot index out of range");
  for (size_t k = 0; k < m; ++k) {
    const cdmr::MetricsRow& row = rows[k];
    if (key == "t") out[k] = row.t;
    else if (key == "J") out[k] = row.global_cost;
    else if (key == "J_i") out[k] = row.robot_cost[robot];
    else if (key == "delta_i") out[k] = row.robot_slack[robot];
    else if (key == "E_i")
      out[k] = robot < row.robot_energy.size()
                   ? row.robot_energy[robot]
                   : std::numeric_limits<double>::quiet_NaN();
    else if (key == "kkt_max") {
      double kkt = 0.0;
      for (double v : row.robot_kkt) kkt = std::max(kkt, v);
      out[k] = kkt;
    } else if (key == "witness_lhs") out[k] = row.witness_lhs;
    else if (key == "witness_rhs") out[k] = row.witness_rhs;
    else if (key == "min_h_energy") out[k] = row.min_h_energy;
    else if (key == "min_h_obstacle") out[k] = row.min_h_obstacle;
    else if (key == "min_obstacle_clearance")
      out[k] = row.min_obstacle_clearance;
    else return fail_arg("unknown series name");
  }
  return CDMR_OK;
}

cdmr_status cdmr_run_write_csv(const cdmr_run* run, const char* path) {
  if (!run || !path) return fail_arg("null argument");
  return guarded([&] {
    cdmr::write_metrics_csv(run->scenario, run->metrics, path);
    return CDMR_OK;
  });
}

cdmr_status cdmr_run_write_frames(const cdmr_run* run, const char* dir) {
  if (!run || !dir) return fail_arg("null argument");
  return guarded([&] {
    cdmr::write_frames_svg(run->scenario, run->metrics, dir);
    return CDMR_OK;
  });
}

cdmr_status cdmr_run_write_energy_chart(const cdmr_run* run,
                                        const char* path) {
  if (!run || !path) return fail_arg("null argument");
  return guarded([&] {
    cdmr::write_energy_chart_svg(run->scenario, run->metrics, path);
    return CDMR_OK;
  });
}

}  // extern "C"
