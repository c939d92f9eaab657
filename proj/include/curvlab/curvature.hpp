#pragma once

#include <span>
#include <vector>

#include "curvlab/differentiation.hpp"
#include "curvlab/field.hpp"

namespace curvlab {

/// Levi-Civita connection coefficients Gamma^k_ij, symmetric in (i, j).
class Connection {
 public:
  explicit Connection(Grid grid);

  const Grid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }

  double& at(std::size_t node, int k, int i, int j) { return data_[offset(k, i, j) + node]; }
  double at(std::size_t node, int k, int i, int j) const { return data_[offset(k, i, j) + node]; }
  std::span<const double> component(int k, int i, int j) const;
  double max_abs() const;

 private:
  std::size_t offset(int k, int i, int j) const {
    const int n = dimension();
    return (static_cast<std::size_t>(k) * TensorField2::packed_count(n) +
            TensorField2::packed_index(n, i, j)) * grid_.node_count();
  }

  Grid grid_;
  std::vector<double> data_;
};

/// Everything downstream code needs from one curvature pass, without the n^4
/// Riemann storage: inverse metric, connection, Ricci, scalar curvature,
/// volume density and the contraction R_ikjl R^kl.
struct CurvatureCore {
  Stencil stencil;
  TensorField2 inverse;
  Connection gamma;
  TensorField2 ricci;
  ScalarField scalar;
  ScalarField density;
  TensorField2 riem_ric;     // R_ikjl R^kl
  ScalarField ricci_norm2;   // |Ric|^2
};

/// The full bundle, including Riemann and its Weyl part.
struct CurvatureBundle {
  Connection gamma;
  TensorField4 riemann;
  TensorField2 ricci;
  ScalarField scalar;
  TensorField4 weyl;
  TensorField2 traceless_ricci;
};

Connection christoffel(const MetricField& g, Stencil stencil = Stencil::Order4);

CurvatureCore curvature_core(const MetricField& g, Stencil stencil = Stencil::Order4);
CurvatureBundle curvature_bundle(const MetricField& g, Stencil stencil = Stencil::Order4);

/// Node-level algebra on row-major n^4 / n^2 blocks.
///
/// Weyl part: W = Rm - (Schouten block), with
///   Rm_ijkt = W_ijkt + (R_ik g_jt - R_it g_jk + R_jt g_ik - R_jk g_it)/(n-2)
///             - R (g_ik g_jt - g_it g_jk)/((n-1)(n-2)).
/// For n = 2 the Weyl block is identically zero.
void weyl_block(std::span<const double> riem, std::span<const double> g, std::span<const double> ric,
                double scalar, int n, std::span<double> weyl);
/// Inverse of weyl_block: reassembles Riemann from W, Ric, R and g.
void riemann_from_weyl(std::span<const double> weyl, std::span<const double> g,
                       std::span<const double> ric, double scalar, int n, std::span<double> riem);

struct HessianResult {
  std::vector<ScalarField> gradient;  // coordinate partials d_i u
  TensorField2 hessian;               // d_i d_j u - Gamma^k_ij d_k u
  ScalarField laplacian;              // g^ij (hessian)_ij
};

HessianResult hessian_laplacian(const ScalarField& u, const MetricField& g,
                                Stencil stencil = Stencil::Order4);
HessianResult hessian_laplacian(const ScalarField& u, const CurvatureCore& core);

/// Rough Laplacian g^kl nabla_k nabla_l T_ij of a symmetric 2-tensor, with the
/// Christoffel corrections applied term by term.
TensorField2 rough_laplacian(const TensorField2& T, const CurvatureCore& core);

/// Bakry-Emery data for the potential f = -log(-R).
struct BakryEmeryData {
  ScalarField potential;          // f
  TensorField2 ricci_f;           // Ric + Hess f - df (x) df
  ScalarField drift_laplacian_f;  // Delta_f f = Delta f - |grad f|^2
  ScalarField laplacian_f;        // Delta f
  ScalarField grad_f_norm2;       // |grad f|^2
  /// Ric^1_f + 3/(4(n-1)) e^{-f} g, which vanishes on critical metrics of the
  /// integrated squared scalar curvature.
  TensorField2 critical_residual;
};

/// Requires R < 0 at every node (PreconditionError naming the node).
BakryEmeryData bakry_emery(const ScalarField& R, const CurvatureCore& core, const MetricField& g);

/// Delta_f u = Delta u - <grad f, grad u>.
ScalarField drift_laplacian(const ScalarField& u, const ScalarField& f, const CurvatureCore& core);

}  // namespace curvlab
