#pragma once

#include <cstdint>

#include "curvlab/field.hpp"

namespace curvlab {

/// Smooth periodic test data built from the lowest Fourier modes
/// (wave-vector entries in {-1, 0, 1}, scaled to each axis length).
/// Deterministic in the seed.

/// Symmetric tensor with every component bounded by `amplitude`.
TensorField2 random_smooth_tensor(const Grid& grid, std::uint64_t seed, double amplitude);

/// delta_ij + random_smooth_tensor(amplitude).
MetricField random_smooth_metric(const Grid& grid, std::uint64_t seed, double amplitude = 0.1);

ScalarField random_smooth_scalar(const Grid& grid, std::uint64_t seed, double amplitude);

}  // namespace curvlab
