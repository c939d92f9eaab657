#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curvlab/field.hpp"

namespace curvlab {

/// Format-neutral view of a serialized field: component-major values
/// (one array of node_count entries per component).
struct FieldData {
  enum class Kind { Scalar, Tensor2, Metric };

  Grid grid;
  Kind kind = Kind::Scalar;
  std::vector<std::string> names;  // one per component, e.g. "g01"
  std::vector<double> values;

  int components() const { return static_cast<int>(names.size()); }
};

std::string to_string(FieldData::Kind kind);

FieldData to_data(const ScalarField& f, const std::string& name = "u");
FieldData to_data(const TensorField2& T, const std::string& prefix = "T");
FieldData to_data(const MetricField& g);

ScalarField scalar_from(const FieldData& d);
TensorField2 tensor_from(const FieldData& d);
MetricField metric_from(const FieldData& d);

/// CSV: a "# curvlab-field" comment line carrying kind and grid shape, a
/// header row (coordinates, then component names), one row per node.
void write_csv(std::ostream& out, const FieldData& d);
FieldData read_csv(std::istream& in);

/// Little-endian binary container, see docs/formats.md.
void write_binary(std::ostream& out, const FieldData& d);
FieldData read_binary(std::istream& in);

/// Picks the format from the extension (".bin" binary, anything else CSV).
void save_field(const std::string& path, const FieldData& d);
FieldData load_field(const std::string& path);

}  // namespace curvlab
