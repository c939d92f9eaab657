#include "curvlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

Grid::Grid(int dimension, int points_per_axis, std::vector<double> lengths)
    : dim_(dimension), points_(points_per_axis), nodes_(1), lengths_(std::move(lengths)) {
  if (dim_ < 2) throw ConfigurationError("grid dimension must be >= 2");
  if (points_ < 8) throw ConfigurationError("grid needs at least 8 points per axis");
  if (static_cast<int>(lengths_.size()) != dim_)
    throw ConfigurationError("grid needs one length per axis");
  for (double L : lengths_)
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigurationError("grid lengths must be positive");

  strides_.assign(static_cast<std::size_t>(dim_), 1);
  for (int a = dim_ - 2; a >= 0; --a)
    strides_[static_cast<std::size_t>(a)] =
        strides_[static_cast<std::size_t>(a) + 1] * static_cast<std::size_t>(points_);
  for (int a = 0; a < dim_; ++a) nodes_ *= static_cast<std::size_t>(points_);
}

Grid Grid::cube(int dimension, int points_per_axis, double length) {
  return Grid(dimension, points_per_axis,
              std::vector<double>(static_cast<std::size_t>(std::max(dimension, 0)), length));
}

Grid Grid::cube(int dimension, int points_per_axis) {
  return cube(dimension, points_per_axis, 2.0 * std::numbers::pi);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing(a);
  return v;
}

void Grid::coordinates(std::size_t node, std::span<double> x) const {
  for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = coordinate(node, a);
}

std::size_t Grid::index(std::span<const int> multi) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    int i = multi[static_cast<std::size_t>(a)] % points_;
    if (i < 0) i += points_;
    idx += static_cast<std::size_t>(i) * stride(a);
  }
  return idx;
}

bool Grid::operator==(const Grid& other) const {
  return dim_ == other.dim_ && points_ == other.points_ && lengths_ == other.lengths_;
}

}  // namespace curvlab
