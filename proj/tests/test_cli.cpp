#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

// End-to-end checks of the installed command line (paths injected by the
// build). Exit codes: 0 success, 2 validation error, 3 infeasible abort.

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CDMR_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string data(const std::string& name) {
  return std::string(CDMR_TEST_DATA) + "/" + name;
}

}  // namespace

TEST_CASE("presets subcommand lists and dumps") {
  CHECK(run_cli("presets") == 0);
  CHECK(run_cli("presets --dump hexagon-formation") == 0);
  CHECK(run_cli("presets --dump nope") != 0);
}

TEST_CASE("run succeeds on a scenario file and writes outputs") {
  const auto out = std::filesystem::temp_directory_path() / "cdmr_cli_run";
  std::filesystem::remove_all(out);
  CHECK(run_cli("run " + data("mini-consensus.json") + " --out " +
                out.string() + " --csv --svg --frames-stride 50 --verify") ==
        0);
  CHECK(std::filesystem::exists(out / "metrics.csv"));
  CHECK(std::filesystem::exists(out / "frames" / "frame_000000.svg"));
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run_cli("run " + data("bad-scenario.json")) == 2);
  CHECK(run_cli("run definitely-not-a-preset") == 2);
}

TEST_CASE("infeasible QP aborts exit with code 3") {
  // robot 0 starts pinned between two overlapping clearance disks whose
  // hard rows contradict on u_x
  CHECK(run_cli("run " + data("infeasible.json")) == 3);
}
