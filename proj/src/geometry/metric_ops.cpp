#include "curvlab/metric_ops.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

constexpr double kInverseTolerance = 1e-12;

Eigen::MatrixXd block_at(const TensorField2& T, std::size_t node) {
  const int n = T.dimension();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = T.at(node, i, j);
  return m;
}

}  // namespace

TensorField2 metric_inverse(const MetricField& g) {
  const int n = g.dimension();
  TensorField2 inv(g.grid());
  const auto I = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t p = 0; p < g.grid().node_count(); ++p) {
    const Eigen::MatrixXd m = block_at(g.components(), p);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    Eigen::MatrixXd mi = ldlt.solve(I);
    mi = 0.5 * (mi + mi.transpose()).eval();
    // One step of iterative refinement tightens the residual to rounding level.
    mi += mi * (I - m * mi);
    mi = 0.5 * (mi + mi.transpose()).eval();
    const double err = (m * mi - I).cwiseAbs().maxCoeff();
    if (!(err <= kInverseTolerance))
      throw DegenerateMetricError("metric inverse residual " + std::to_string(err), p);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) inv.at(p, i, j) = mi(i, j);
  }
  return inv;
}

ScalarField volume_density(const MetricField& g) {
  ScalarField out(g.grid());
  for (std::size_t p = 0; p < g.grid().node_count(); ++p) {
    const Eigen::MatrixXd m = block_at(g.components(), p);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    out[p] = llt.matrixL().toDenseMatrix().diagonal().prod();
  }
  return out;
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

double integrate_with_density(std::span<const double> values, const ScalarField& density,
                              double cell_volume) {
  std::vector<double> w(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) w[p] = values[p] * density[p];
  return compensated_sum(w) * cell_volume;
}

double integrate(const ScalarField& field, const MetricField& g, std::optional<double> exponent,
                 const std::vector<bool>* mask) {
  field.require_finite("integrand");
  if (!(field.grid() == g.grid())) throw ConfigurationError("integrand and metric grids differ");
  if (exponent && !(*exponent >= 1.0)) throw ConfigurationError("integration exponent must be >= 1");
  if (mask && mask->size() != field.size()) throw ConfigurationError("mask size mismatch");
  const ScalarField rho = volume_density(g);
  std::vector<double> v(field.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    double x = field[p];
    if (exponent) x = std::pow(std::abs(x), *exponent);
    if (mask && !(*mask)[p]) x = 0.0;
    v[p] = x;
  }
  return integrate_with_density(v, rho, g.grid().cell_volume());
}

ScalarField tensor_pairing(const TensorField2& A, const TensorField2& B, const TensorField2& ginv) {
  const int n = A.dimension();
  ScalarField out(A.grid());
  std::vector<double> a(static_cast<std::size_t>(n * n)), b(a.size()), gi(a.size());
  for (std::size_t p = 0; p < A.node_count(); ++p) {
    A.gather(p, a);
    B.gather(p, b);
    ginv.gather(p, gi);
    Eigen::Map<const Eigen::MatrixXd> Am(a.data(), n, n), Bm(b.data(), n, n), Gm(gi.data(), n, n);
    out[p] = (Gm * Am * Gm).cwiseProduct(Bm).sum();
  }
  return out;
}

ScalarField tensor_norm_squared(const TensorField2& T, const TensorField2& ginv) {
  return tensor_pairing(T, T, ginv);
}

ScalarField metric_trace(const TensorField2& T, const TensorField2& ginv) {
  const int n = T.dimension();
  ScalarField out(T.grid());
  for (std::size_t p = 0; p < T.node_count(); ++p) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += ginv.at(p, i, j) * T.at(p, i, j);
    out[p] = s;
  }
  return out;
}

ScalarField gradient_norm_squared(const std::vector<ScalarField>& du, const TensorField2& ginv) {
  const int n = ginv.dimension();
  ScalarField out(ginv.grid());
  for (std::size_t p = 0; p < ginv.node_count(); ++p) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += ginv.at(p, i, j) * du[static_cast<std::size_t>(i)][p] * du[static_cast<std::size_t>(j)][p];
    out[p] = s;
  }
  return out;
}

}  // namespace curvlab
