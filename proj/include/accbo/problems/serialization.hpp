#pragma once

#include <string>

#include "accbo/core/json_reader.hpp"
#include "accbo/problems/instance.hpp"

namespace accbo::problems {

/// Reads an instance document. Either `{"fixture": name}` or a full kind
/// description; an optional "noise" object sets the oracle noise. Unknown
/// or missing fields raise ConfigError naming the field path.
BilevelInstance instance_from_json(const core::Json& node, const std::string& path = "instance");

/// Full kind description (never the fixture shorthand), including noise.
core::Json instance_to_json(const BilevelInstance& inst);

NoiseModel noise_from_json(const core::Json& node, const std::string& path);
core::Json noise_to_json(const NoiseModel& noise);

}  // namespace accbo::problems
