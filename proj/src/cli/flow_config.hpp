#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "curvlab/flow.hpp"
#include "json.hpp"
#include "presets.hpp"

namespace curvlab::cli {

/// A flow run as described by an INI config, see docs/formats.md.
struct FlowJob {
  FlowConfig config;
  std::string preset;  // exactly one of preset / file
  std::string file;
  PresetOptions start;
  std::optional<FlowFamily> family;  // when stated, must match the start metric
};

/// ConfigurationError on unknown sections or keys and on malformed values.
FlowJob parse_flow_config(std::istream& in, std::uint64_t default_seed);

nlohmann::json to_json(const FlowJob& job);

}  // namespace curvlab::cli
