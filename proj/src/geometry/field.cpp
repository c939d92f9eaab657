#include "curvlab/field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "curvlab/errors.hpp"

namespace curvlab {

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(Grid grid, double value)
    : grid_(std::move(grid)), values_(grid_.node_count(), value) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.node_count())
    throw ConfigurationError("scalar field size does not match grid");
}

ScalarField ScalarField::from_function(const Grid& grid,
                                       const std::function<double(std::span<const double>)>& fn) {
  ScalarField out(grid);
  std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    grid.coordinates(p, x);
    out[p] = fn(x);
  }
  return out;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

void ScalarField::require_finite(const char* what) const {
  for (std::size_t p = 0; p < values_.size(); ++p)
    if (!std::isfinite(values_[p])) throw NonFiniteError(std::string(what) + " is not finite", p);
}

// --------------------------------------------------------------- TensorField2

TensorField2::TensorField2(Grid grid)
    : grid_(std::move(grid)),
      data_(static_cast<std::size_t>(packed_count(grid_.dimension())) * grid_.node_count(), 0.0) {}

std::span<double> TensorField2::component(int i, int j) {
  const auto n = node_count();
  return std::span<double>(data_).subspan(
      static_cast<std::size_t>(packed_index(dimension(), i, j)) * n, n);
}

std::span<const double> TensorField2::component(int i, int j) const {
  const auto n = node_count();
  return std::span<const double>(data_).subspan(
      static_cast<std::size_t>(packed_index(dimension(), i, j)) * n, n);
}

void TensorField2::gather(std::size_t node, std::span<double> out) const {
  const int n = dimension();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = at(node, i, j);
      out[static_cast<std::size_t>(i * n + j)] = v;
      out[static_cast<std::size_t>(j * n + i)] = v;
    }
}

void TensorField2::scatter(std::size_t node, std::span<const double> in) {
  const int n = dimension();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      at(node, i, j) =
          0.5 * (in[static_cast<std::size_t>(i * n + j)] + in[static_cast<std::size_t>(j * n + i)]);
}

void TensorField2::require_finite(const char* what) const {
  const auto nodes = node_count();
  for (std::size_t k = 0; k < data_.size(); ++k)
    if (!std::isfinite(data_[k]))
      throw NonFiniteError(std::string(what) + " is not finite", k % nodes);
}

// --------------------------------------------------------------- TensorField4

TensorField4::TensorField4(Grid grid)
    : grid_(std::move(grid)), data_(grid_.node_count(), 0.0) {
  const auto n = static_cast<std::size_t>(grid_.dimension());
  data_.assign(n * n * n * n * grid_.node_count(), 0.0);
}

std::span<const double> TensorField4::component(int i, int j, int k, int l) const {
  const auto nodes = grid_.node_count();
  return std::span<const double>(data_).subspan(flat(i, j, k, l) * nodes, nodes);
}

double TensorField4::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------- MetricField

void validate_metric_block(std::span<const double> block, int n, std::size_t node) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = block[static_cast<std::size_t>(i * n + j)];
      if (!std::isfinite(v)) throw NonFiniteError("metric component is not finite", node);
      m(i, j) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < MetricField::kMinEigenvalue)
    throw DegenerateMetricError("metric eigenvalue " + std::to_string(lo) + " below threshold",
                                node);
  if (hi / lo > MetricField::kMaxCondition)
    throw DegenerateMetricError("metric condition number above threshold", node);
}

MetricField::MetricField(TensorField2 components) : g_(std::move(components)) {
  const int n = g_.dimension();
  std::vector<double> block(static_cast<std::size_t>(n * n));
  for (std::size_t p = 0; p < g_.node_count(); ++p) {
    g_.gather(p, block);
    validate_metric_block(block, n, p);
  }
}

MetricField MetricField::identity(const Grid& grid) {
  TensorField2 g(grid);
  for (int i = 0; i < grid.dimension(); ++i) std::ranges::fill(g.component(i, i), 1.0);
  return MetricField(std::move(g));
}

MetricField MetricField::constant(const Grid& grid, std::span<const double> matrix) {
  TensorField2 g(grid);
  for (std::size_t p = 0; p < grid.node_count(); ++p) g.scatter(p, matrix);
  return MetricField(std::move(g));
}

MetricField MetricField::from_function(
    const Grid& grid, const std::function<void(std::span<const double>, std::span<double>)>& fn) {
  const int n = grid.dimension();
  TensorField2 g(grid);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> block(static_cast<std::size_t>(n * n));
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    grid.coordinates(p, x);
    fn(x, block);
    g.scatter(p, block);
  }
  return MetricField(std::move(g));
}

double MetricField::min_eigenvalue() const {
  const int n = dimension();
  std::vector<double> block(static_cast<std::size_t>(n * n));
  Eigen::MatrixXd m(n, n);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < g_.node_count(); ++p) {
    g_.gather(p, block);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = block[static_cast<std::size_t>(i * n + j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace curvlab
