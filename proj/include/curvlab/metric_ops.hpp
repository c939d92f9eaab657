#pragma once

#include <optional>
#include <span>
#include <vector>

#include "curvlab/field.hpp"

namespace curvlab {

/// Pointwise inverse g^{ij}. Throws DegenerateMetricError if any node's
/// product with the original misses the identity by more than 1e-12.
TensorField2 metric_inverse(const MetricField& g);

/// Pointwise sqrt(det g), the density of dV against the chart measure.
ScalarField volume_density(const MetricField& g);

/// Fixed-order compensated (Neumaier) sum.
double compensated_sum(std::span<const double> values);

/// Node-sum quadrature of field * sqrt(det g) * cell volume.
/// With `exponent` set, integrates |field|^q instead. With `mask` set, only
/// nodes where mask is true contribute.
double integrate(const ScalarField& field, const MetricField& g,
                 std::optional<double> exponent = std::nullopt,
                 const std::vector<bool>* mask = nullptr);

/// Same quadrature with a precomputed volume density.
double integrate_with_density(std::span<const double> values, const ScalarField& density,
                              double cell_volume);

/// |T|^2 = T_ij T_kl g^ik g^jl pointwise.
ScalarField tensor_norm_squared(const TensorField2& T, const TensorField2& ginv);

/// <A, B> = A_ij B_kl g^ik g^jl pointwise.
ScalarField tensor_pairing(const TensorField2& A, const TensorField2& B, const TensorField2& ginv);

/// g^{ij} T_ij pointwise.
ScalarField metric_trace(const TensorField2& T, const TensorField2& ginv);

/// |du|^2 = g^{ij} d_i u d_j u pointwise from the coordinate partials.
ScalarField gradient_norm_squared(const std::vector<ScalarField>& du, const TensorField2& ginv);

}  // namespace curvlab
