#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/functionals.hpp"
#include "curvlab/warped.hpp"

namespace curvlab::cli {

/// A metric from a preset or a file, in whichever representation evaluates it.
struct ResolvedMetric {
  std::string label;
  std::optional<MetricField> grid;
  std::optional<HomogeneousEinstein> homogeneous;
  std::optional<WarpedProductMetric> warped;
};

struct PresetOptions {
  int points = 0;  // 0 picks the preset's default resolution
  std::uint64_t seed = 0;
  double amplitude = 0.0;  // 0 picks the preset's default
};

std::vector<std::string> preset_names();
std::string preset_help();

/// ConfigurationError for unknown names.
ResolvedMetric resolve_preset(const std::string& name, const PresetOptions& opt);
ResolvedMetric load_metric_file(const std::string& path);

}  // namespace curvlab::cli
