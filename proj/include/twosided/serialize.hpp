#pragma once

#include <json.hpp>

#include "twosided/conditioning.hpp"
#include "twosided/engine.hpp"
#include "twosided/power.hpp"
#include "twosided/sim.hpp"

namespace twosided {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const SpilloverEvent& event);
nlohmann::json to_json(const KBlockEvent& event);
nlohmann::json to_json(const ConditioningEvent& event);
nlohmann::json to_json(const TestConfig& config);
/// Includes schema_version; NaN statistics serialize as null.
nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const SimReport& report, bool include_timing = false);

SimConfig sim_config_from_json(const nlohmann::json& j);

}  // namespace twosided
