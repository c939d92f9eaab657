#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "curvlab/grid.hpp"

namespace curvlab {

/// One real value per grid node.
class ScalarField {
 public:
  explicit ScalarField(Grid grid, double value = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  static ScalarField from_function(const Grid& grid,
                                   const std::function<double(std::span<const double>)>& fn);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t node) { return values_[node]; }
  double operator[](std::size_t node) const { return values_[node]; }

  double max_abs() const;
  double min() const;
  double max() const;

  /// Throws NonFiniteError naming the first offending node.
  void require_finite(const char* what) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Symmetric n x n tensor per node, stored as n(n+1)/2 contiguous component arrays.
///
/// component(i, j) and component(j, i) alias the same storage, so symmetry holds
/// by construction.
class TensorField2 {
 public:
  explicit TensorField2(Grid grid);

  const Grid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }
  std::size_t node_count() const { return grid_.node_count(); }

  static int packed_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  static int packed_count(int n) { return n * (n + 1) / 2; }

  std::span<double> component(int i, int j);
  std::span<const double> component(int i, int j) const;

  double& at(std::size_t node, int i, int j) {
    return data_[static_cast<std::size_t>(packed_index(dimension(), i, j)) * node_count() + node];
  }
  double at(std::size_t node, int i, int j) const {
    return data_[static_cast<std::size_t>(packed_index(dimension(), i, j)) * node_count() + node];
  }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  /// Copies the full n x n block at `node` into `out` (row-major).
  void gather(std::size_t node, std::span<double> out) const;
  void scatter(std::size_t node, std::span<const double> in);

  void require_finite(const char* what) const;

 private:
  Grid grid_;
  std::vector<double> data_;
};

/// Full n^4 block per node (curvature-type tensors), component-major storage.
class TensorField4 {
 public:
  explicit TensorField4(Grid grid);

  const Grid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }

  std::size_t flat(int i, int j, int k, int l) const {
    const auto n = static_cast<std::size_t>(dimension());
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  }
  double& at(std::size_t node, int i, int j, int k, int l) {
    return data_[flat(i, j, k, l) * grid_.node_count() + node];
  }
  double at(std::size_t node, int i, int j, int k, int l) const {
    return data_[flat(i, j, k, l) * grid_.node_count() + node];
  }
  std::span<const double> component(int i, int j, int k, int l) const;

  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> data_;
};

/// Riemannian metric on a periodic grid: symmetric, finite and positive
/// definite at every node (checked on construction).
class MetricField {
 public:
  /// Smallest admissible eigenvalue and largest admissible condition number.
  static constexpr double kMinEigenvalue = 1e-10;
  static constexpr double kMaxCondition = 1e10;

  explicit MetricField(TensorField2 components);

  static MetricField identity(const Grid& grid);
  static MetricField constant(const Grid& grid, std::span<const double> matrix);
  /// `fn(x, g)` fills the row-major n x n matrix g at coordinates x.
  static MetricField from_function(
      const Grid& grid, const std::function<void(std::span<const double>, std::span<double>)>& fn);

  const Grid& grid() const { return g_.grid(); }
  int dimension() const { return g_.dimension(); }
  const TensorField2& components() const { return g_; }
  double at(std::size_t node, int i, int j) const { return g_.at(node, i, j); }

  /// Smallest eigenvalue over all nodes.
  double min_eigenvalue() const;

 private:
  TensorField2 g_;
};

/// Metric check for a single node; throws DegenerateMetricError / NonFiniteError.
void validate_metric_block(std::span<const double> block, int n, std::size_t node);

}  // namespace curvlab
