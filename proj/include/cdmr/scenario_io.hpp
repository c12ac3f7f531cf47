#ifndef CDMR_SCENARIO_IO_HPP
#define CDMR_SCENARIO_IO_HPP

#include <string>
#include <vector>

#include "cdmr/sim.hpp"

namespace cdmr {

/// Parse and validate a scenario JSON document. All defaults are
/// materialized (seeded-random robot placements included), so
/// serialize -> parse -> serialize is the identity.
Scenario parse_scenario_json(const std::string& json_text);

/// Reads the file at path, then parse_scenario_json.
Scenario parse_scenario_file(const std::string& path);

/// Full effective configuration as a deterministic JSON string.
std::string serialize_scenario(const Scenario& scenario);

std::vector<std::string> preset_names();
Scenario make_preset(const std::string& name);

}  // namespace cdmr

#endif  // CDMR_SCENARIO_IO_HPP
