#pragma once

// Named predictor presets and JSON configuration.
//
// Every predictor kind has a preset config object. User overrides are merged
// into it (objects recursively, everything else replaced) and the result is
// parsed strictly: unknown keys and wrongly typed values raise ConfigError.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypre/baselines.hpp"
#include "hypre/hd_predictors.hpp"
#include "hypre/predictor.hpp"

namespace hypre {

using Json = nlohmann::ordered_json;

// Accepts '_' in place of '-' ("hypre_ideal"). Throws ConfigError for
// unknown kinds.
std::string canonical_kind(const std::string& kind);
const std::vector<std::string>& predictor_kinds();

Json preset_config(const std::string& kind);
// Preset merged with overrides, validated, and re-serialised.
Json resolve_config(const std::string& kind, const Json& overrides);

std::unique_ptr<Predictor> make_predictor(const std::string& kind, const Json& overrides,
                                          std::uint64_t seed);

HypreConfig hypre_config_from_json(const Json& j);
HdBaseConfig hd_base_config_from_json(const Json& j);
BimodalConfig bimodal_config_from_json(const Json& j);
GshareConfig gshare_config_from_json(const Json& j);
PerceptronConfig perceptron_config_from_json(const Json& j);

Json to_json(const HypreConfig& c);
Json to_json(const HdBaseConfig& c);
Json to_json(const BimodalConfig& c);
Json to_json(const GshareConfig& c);
Json to_json(const PerceptronConfig& c);

HypreConfig hypre_ideal_config();
HypreConfig hypre_realistic_config();

}  // namespace hypre
