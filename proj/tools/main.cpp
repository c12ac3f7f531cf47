// cdmr command line: scenario-driven batch runner over the C API.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cdmr.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

int exit_code_for(cdmr_status status) {
  switch (status) {
    case CDMR_OK:
      return kExitOk;
    case CDMR_ERR_VALIDATION:
      return kExitValidation;
    case CDMR_ERR_INFEASIBLE:
      return kExitInfeasible;
    default:
      return kExitFailure;
  }
}

int fail(cdmr_status status, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), cdmr_last_error());
  return exit_code_for(status);
}

bool is_preset(const std::string& name) {
  for (size_t i = 0; i < cdmr_preset_count(); ++i)
    if (name == cdmr_preset_name(i)) return true;
  return false;
}

int run_command(const std::string& target, const std::string& out_dir,
                int frames_stride, bool want_csv, bool want_svg, bool verify) {
  cdmr_scenario* scenario = nullptr;
  cdmr_status status;
  if (std::filesystem::exists(target)) {
    status = cdmr_scenario_from_file(target.c_str(), &scenario);
  } else if (is_preset(target)) {
    status = cdmr_scenario_preset(target.c_str(), &scenario);
  } else {
    std::fprintf(stderr, "error: '%s' is neither a scenario file nor a preset\n",
                 target.c_str());
    return kExitValidation;
  }
  if (status != CDMR_OK) return fail(status, "loading " + target);

  if (!want_csv && !want_svg) want_csv = true;  // default output

  cdmr_run* run = nullptr;
  status = cdmr_run_execute(scenario, verify ? 1 : 0,
                            want_svg ? frames_stride : 0, &run);
  if (status != CDMR_OK) {
    cdmr_scenario_free(scenario);
    return fail(status, "running " + target);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s\n", out_dir.c_str());
    cdmr_run_free(run);
    cdmr_scenario_free(scenario);
    return kExitFailure;
  }

  if (want_csv) {
    const std::string csv = out_dir + "/metrics.csv";
    status = cdmr_run_write_csv(run, csv.c_str());
    if (status != CDMR_OK) return fail(status, "writing " + csv);
    std::printf("wrote %s\n", csv.c_str());
  }
  if (want_svg) {
    const std::string frames = out_dir + "/frames";
    status = cdmr_run_write_frames(run, frames.c_str());
    if (status != CDMR_OK) return fail(status, "writing frames");
    std::printf("wrote %s/\n", frames.c_str());
    const std::string chart = out_dir + "/energy.svg";
    if (cdmr_run_write_energy_chart(run, chart.c_str()) == CDMR_OK)
      std::printf("wrote %s\n", chart.c_str());
  }

  // run summary
  const size_t steps = cdmr_run_step_count(run);
  std::printf("steps: %zu\n", steps);
  const double settle = cdmr_run_settling_time(run);
  if (std::isnan(settle))
    std::printf("settling time: not settled\n");
  else
    std::printf("settling time: %.3f s\n", settle);
  if (steps > 0) {
    double j_final = 0.0;
    size_t len = 0;
    std::vector<double> series(steps);
    if (cdmr_run_series(run, "J", 0, series.data(), steps, &len) == CDMR_OK)
      j_final = series[steps - 1];
    std::printf("final cost: %.6g\n", j_final);
  }
  const double min_energy = cdmr_run_min_energy(run);
  if (!std::isnan(min_energy)) {
    std::printf("min energy: %.4f (budget eps=%.2e)\n", min_energy,
                cdmr_run_eps_energy(run));
    for (size_t i = 0; i < cdmr_scenario_robot_count(scenario); ++i) {
      int cycles = 0;
      if (cdmr_run_charge_cycles(run, i, &cycles) == CDMR_OK)
        std::printf("robot %zu charge cycles: %d\n", i, cycles);
    }
  }
  const double min_clearance = cdmr_run_min_obstacle_distance(run);
  if (!std::isnan(min_clearance))
    std::printf("min obstacle distance: %.4f (budget eps=%.2e)\n",
                min_clearance, cdmr_run_eps_obstacle_dist(run));

  cdmr_run_free(run);
  cdmr_scenario_free(scenario);
  return kExitOk;
}

int presets_command(const std::string& dump) {
  if (dump.empty()) {
    for (size_t i = 0; i < cdmr_preset_count(); ++i)
      std::printf("%s\n", cdmr_preset_name(i));
    return kExitOk;
  }
  cdmr_scenario* scenario = nullptr;
  const cdmr_status status = cdmr_scenario_preset(dump.c_str(), &scenario);
  if (status != CDMR_OK) return fail(status, "preset " + dump);
  std::vector<char> buf(1 << 16);
  size_t written = 0;
  if (cdmr_scenario_to_json(scenario, buf.data(), buf.size(), &written) !=
      CDMR_OK) {
    cdmr_scenario_free(scenario);
    return kExitFailure;
  }
  std::printf("%s\n", buf.data());
  cdmr_scenario_free(scenario);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constraint-driven multi-robot simulation runner"};
  app.require_subcommand(1);

  std::string target, out_dir = "out", dump;
  int frames_stride = 100;
  bool want_csv = false, want_svg = false, verify = false;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a scenario");
  run_cmd->add_option("scenario", target,
                      "scenario JSON file or preset name")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default: out)");
  run_cmd->add_option("--frames-stride", frames_stride,
                      "steps between SVG frames (default: 100)");
  run_cmd->add_flag("--csv", want_csv, "write metrics.csv");
  run_cmd->add_flag("--svg", want_svg, "write SVG frames and energy chart");
  run_cmd->add_flag("--verify", verify,
                    "assert module invariants at every step");

  CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in scenarios");
  presets_cmd->add_option("--dump", dump, "print one preset's JSON");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed())
    return run_command(target, out_dir, frames_stride, want_csv, want_svg,
                       verify);
  return presets_command(dump);
}
