#pragma once

#include <span>
#include <string>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/grid.hpp"

namespace curvlab {

/// Accuracy order of the central-difference stencils. `Spectral` is the
/// full-width periodic stencil (the infinite-order limit of central
/// differences, exact on every resolved Fourier mode).
enum class Stencil { Order2 = 2, Order4 = 4, Order6 = 6, Order8 = 8, Spectral = 0 };

std::string to_string(Stencil s);
Stencil stencil_from_string(const std::string& name);

/// Finite-difference weights for the m-th derivative at x0 on arbitrary nodes
/// (Fornberg's recursion). Returns one weight per node.
std::vector<double> fornberg_weights(int derivative, double x0, std::span<const double> nodes);

/// Antisymmetric/symmetric coefficient pairs of a periodic central stencil:
///   d/dx u_i   = sum_k d1[k-1] (u_{i+k} - u_{i-k})
///   d2/dx2 u_i = sum_k d2[k-1] (u_{i+k} + u_{i-k} - 2 u_i)
/// Constants therefore differentiate to exactly zero.
struct PeriodicStencil {
  std::vector<double> d1;
  std::vector<double> d2;

  static PeriodicStencil make(Stencil stencil, int points, double length);

  int reach() const { return static_cast<int>(d1.size()); }
  void first(std::span<const double> in, std::span<double> out) const;
  void second(std::span<const double> in, std::span<double> out) const;
};

/// Periodic partial derivatives of grid component arrays.
class Differentiator {
 public:
  explicit Differentiator(const Grid& grid, Stencil stencil = Stencil::Order4);

  const Grid& grid() const { return grid_; }
  Stencil stencil() const { return stencil_; }

  void first(std::span<const double> in, int axis, std::span<double> out) const;
  /// Second derivative along one axis (a == b) or mixed partial (a != b).
  /// Mixed partials apply first(a) then first(b).
  void second(std::span<const double> in, int a, int b, std::span<double> out) const;

  std::vector<double> first(std::span<const double> in, int axis) const;
  std::vector<double> second(std::span<const double> in, int a, int b) const;

 private:
  void apply(std::span<const double> in, int axis, bool second_order, std::span<double> out) const;

  Grid grid_;
  Stencil stencil_;
  std::vector<PeriodicStencil> axes_;
};

/// First partials per axis and second partials for every pair a <= b.
struct ScalarDerivatives {
  std::vector<ScalarField> first;
  std::vector<ScalarField> second;  // packed a <= b, empty when order == 1

  const ScalarField& d2(int a, int b) const;
};

struct TensorDerivatives {
  std::vector<TensorField2> first;
  std::vector<TensorField2> second;  // packed a <= b, empty when order == 1

  const TensorField2& d2(int a, int b) const;
};

/// Periodic central differences of a field; `order` is 1 or 2.
/// Throws NonFiniteError naming the node of the first non-finite input.
ScalarDerivatives partial_derivatives(const ScalarField& field, int order,
                                      Stencil stencil = Stencil::Order4);
TensorDerivatives partial_derivatives(const TensorField2& field, int order,
                                      Stencil stencil = Stencil::Order4);

}  // namespace curvlab
