#pragma once

#include <string>
#include <variant>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/field.hpp"
#include "curvlab/warped.hpp"

namespace curvlab {

/// Integrated |Ric|^2 + t R^2 for a finite t.
struct FiniteT {
  double t = 0.0;
};
/// Integrated R^2 alone (the formal t = +infinity member of the family).
struct SigmaOnly {};

using FunctionalSpec = std::variant<FiniteT, SigmaOnly>;

std::string to_string(const FunctionalSpec& spec);
/// Parses "sigma" / "s2" or a number.
FunctionalSpec spec_from_string(const std::string& text);

struct GradientReport {
  TensorField2 gradient;
  ScalarField trace;  // g^ij G_ij
  double sup_norm = 0.0;  // max over nodes of |G|_g
  double l2_norm = 0.0;   // (integral |G|_g^2 dV)^(1/2)
  double value = 0.0;     // functional value
};

/// Curvature-derived fields shared by every gradient assembly.
struct GradientTerms {
  CurvatureCore core;
  TensorField2 ricci_laplacian;  // rough Laplacian of Ric
  HessianResult scalar_hessian;  // Hessian and Laplacian of R
};

GradientTerms gradient_terms(const MetricField& g, Stencil stencil = Stencil::Order4);

double functional_value(const CurvatureCore& core, const FunctionalSpec& spec);
double functional_value(const MetricField& g, const FunctionalSpec& spec, Stencil stencil = Stencil::Order4);

GradientReport assemble_gradient(const GradientTerms& terms, const MetricField& g, const FunctionalSpec& spec);

GradientReport gradient(const MetricField& g, const FunctionalSpec& spec, Stencil stencil = Stencil::Order4);
GradientReport grad_f2t(const MetricField& g, double t, Stencil stencil = Stencil::Order4);
GradientReport grad_s2(const MetricField& g, Stencil stencil = Stencil::Order4);
/// Gradient of integrated |Ric|^2 assembled from its own formula.
GradientReport grad_r2(const MetricField& g, Stencil stencil = Stencil::Order4);

/// Three-dimensional assembly that eliminates the Riemann contraction with
///   R_ikjl R^kl = 3/2 R R_ij + (|Ric|^2 - R^2/2) g_ij - 2 R_ik R^k_j,
/// valid because the Weyl tensor vanishes in three dimensions.
GradientReport dim3_gradient(const MetricField& g, double t, Stencil stencil = Stencil::Order4);
GradientReport dim3_gradient(const GradientTerms& terms, const MetricField& g, double t);

/// trace(G) minus the closed-form trace, which holds for every metric:
///   finite t: -(n + 4(n-1)t)/2 Delta R + (n-4)/2 (|Ric|^2 + t R^2)
///   sigma:    -2(n-1) Delta R + (n-4)/2 R^2
ScalarField trace_identity_residual(const GradientTerms& terms, const MetricField& g, const FunctionalSpec& spec);
ScalarField trace_identity_residual(const MetricField& g, const FunctionalSpec& spec,
                                    Stencil stencil = Stencil::Order4);

/// <G, h> = integral G_ij h_kl g^ik g^jl dV.
double l2_pairing(const TensorField2& G, const TensorField2& h, const CurvatureCore& core);

struct GateauxRow {
  double epsilon;
  double fd_derivative;
  double relative_error;
  bool cancellation;  // the two displaced values agree to almost all digits
};

struct GateauxReport {
  FunctionalSpec spec;
  double pairing = 0.0;           // <G, h>
  std::vector<GateauxRow> rows;   // one per epsilon
  double best_relative_error = 0.0;
  double best_epsilon = 0.0;
  double observed_order = 0.0;    // from the two largest epsilons
  double richardson_relative_error = 0.0;  // (100 D(e/10) - D(e)) / 99 at the best pair
};

std::vector<double> default_epsilon_ladder();

/// Central differences of the functionals along g + eps h against the L2
/// pairing with the assembled gradient, for several specs at once (the
/// displaced curvature is shared).
std::vector<GateauxReport> gateaux_fd_check(const MetricField& g, const std::vector<FunctionalSpec>& specs,
                                            const TensorField2& h, const std::vector<double>& epsilons,
                                            Stencil stencil = Stencil::Order4);

// ------------------------------------------------------------ warped products

/// Gradient of a warped product in the orthonormal frame: one radial and one
/// (repeated) fiber component per sample.
struct WarpedGradient {
  std::vector<double> radial;
  std::vector<double> tangential;
  std::vector<double> trace;
  double value = 0.0;
  double sup_norm = 0.0;  // max |G|_g = sqrt(G_rr^2 + (n-1) G_tan^2)
};

double functional_value(const WarpedProductMetric& w, const FunctionalSpec& spec);
WarpedGradient warped_gradient(const WarpedProductMetric& w, const FunctionalSpec& spec);
/// Derivative of the functional with respect to the profile samples,
/// density 2(n-1) G_tan phi^{n-2} times the fiber volume (per unit r).
std::vector<double> profile_gradient_density(const WarpedProductMetric& w, const WarpedGradient& G);

// ------------------------------------------------- homogeneous Einstein spaces

/// Einstein metric with constant scalar curvature R in dimension n (round
/// spheres, hyperbolic spaces, flat tori), evaluated in closed form.
struct HomogeneousEinstein {
  int n = 3;
  double scalar = 0.0;
  double volume = 1.0;

  static HomogeneousEinstein unit_sphere(int n);
  static HomogeneousEinstein hyperbolic(int n);
  static HomogeneousEinstein flat(int n, double volume = 1.0);

  /// Scale the metric by c^2.
  HomogeneousEinstein scaled(double c) const;
};

double functional_value(const HomogeneousEinstein& m, const FunctionalSpec& spec);
/// G = coefficient * g.
double gradient_coefficient(const HomogeneousEinstein& m, const FunctionalSpec& spec);
/// Ric^1_f + 3/(4(n-1)) e^{-f} g = coefficient * g for f = -log(-R).
double bakry_emery_residual_coefficient(const HomogeneousEinstein& m);

}  // namespace curvlab
