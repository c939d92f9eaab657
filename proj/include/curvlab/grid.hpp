#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace curvlab {

/// Uniform periodic coordinate grid on the torus [0, L_0) x ... x [0, L_{n-1}).
///
/// Nodes are stored in row-major order: the last axis varies fastest.
class Grid {
 public:
  Grid(int dimension, int points_per_axis, std::vector<double> lengths);

  /// Cube of side `length` (default 2*pi) in every axis.
  static Grid cube(int dimension, int points_per_axis, double length);
  static Grid cube(int dimension, int points_per_axis);

  int dimension() const { return dim_; }
  int points() const { return points_; }
  std::size_t node_count() const { return nodes_; }

  double length(int axis) const { return lengths_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return length(axis) / points_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  /// Chart measure of one cell, prod_a h_a.
  double cell_volume() const;

  /// Integer index of `node` along `axis`.
  int axis_index(std::size_t node, int axis) const {
    return static_cast<int>((node / stride(axis)) % static_cast<std::size_t>(points_));
  }
  double coordinate(std::size_t node, int axis) const {
    return axis_index(node, axis) * spacing(axis);
  }
  void coordinates(std::size_t node, std::span<double> x) const;

  std::size_t index(std::span<const int> multi) const;

  bool operator==(const Grid& other) const;

 private:
  int dim_;
  int points_;
  std::size_t nodes_;
  std::vector<double> lengths_;
  std::vector<std::size_t> strides_;
};

}  // namespace curvlab
