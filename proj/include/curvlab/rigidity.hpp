#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/field.hpp"
#include "curvlab/warped.hpp"

namespace curvlab {

// ------------------------------------------------------------ constants

/// Polynomial constants of the quadratic-negativity argument for n > 4.
/// Integer quantities are kept as exact decimal strings next to their
/// double values.
struct RigidityConstants {
  int n = 5;
  std::string a_exact, b_exact, c_exact, delta2_exact;
  double a = 0.0, b = 0.0, c = 0.0, delta2 = 0.0;
  /// b^2 - 4ac and 64 n (n-1) (n-4) (n(5n-26) + 9) agree as integers.
  bool delta2_agree = false;
  double A_lo = 0.0, A_hi = 0.0;  // roots of a A^2 - b A + c
  double C = 0.0;                  // (b - sqrt(delta2)) / (2a)
  double q_star = 0.0;             // (n-4) / (4 C (n-1)) + 2
  double q_star_closed = 0.0;      // 2 + 2 (n-3)^2 (n-4) / (b - sqrt(delta2))
};

RigidityConstants compute_constants(int n);

/// -alpha t^2 + beta t - gamma for the admissible parameter A.
struct QuadraticCoefficients {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double delta1 = 0.0;  // beta^2 - 4 alpha gamma
};

QuadraticCoefficients quadratic_coefficients(int n, double A);

struct NegativityReport {
  QuadraticCoefficients q;
  double delta1_factored = 0.0;  // (a A^2 - b A + c) / (16 (n-1)^3)
  std::optional<double> lambda;  // gamma - beta^2/(4 alpha), only inside the interval
  double sampled_max = 0.0;      // dense grid over [-t_range, t_range], refined locally
  double sampled_argmax = 0.0;
  double vertex_gap = 0.0;       // |sampled_max + lambda|
  bool sampled_below = false;    // sampled quadratic <= -lambda + 1e-12 everywhere
};

NegativityReport quadratic_negativity(int n, double A, double t_range = 1e3, int samples = 2'000'001);

/// `count` equally spaced points strictly inside (A_lo, A_hi).
std::vector<double> interior_points(const RigidityConstants& k, int count);

// -------------------------------------------------------- Hessian inequality

/// Pointwise |Hess w|^2 - (Delta w)^2/(n-1) + Delta w <grad|grad w|^2, grad w> / ((n-1)|grad w|^2)
/// in coordinates with inverse metric `inverse` (row-major n x n). Covector
/// inputs are coordinate partials. Throws PreconditionError when grad w = 0.
struct HessianSample {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  double scale = 0.0;     // magnitude of the individual terms
};

HessianSample hessian_inequality_check(std::span<const double> gradient, std::span<const double> hessian,
                                       std::span<const double> grad_normsq, std::span<const double> inverse);
/// Euclidean frame.
HessianSample hessian_inequality_check(std::span<const double> gradient, std::span<const double> hessian,
                                       std::span<const double> grad_normsq);

struct HessianSuiteReport {
  std::size_t samples = 0;
  std::size_t skipped = 0;     // nodes with |grad w|^2 below the cutoff
  std::size_t violations = 0;  // residual < -tolerance * (1 + scale)
  double worst_relative = 0.0; // min residual / (1 + scale)
};

/// Evaluates the inequality at every node of a field w on metric g, with the
/// gradient of |grad w|^2 taken by finite differences of that field.
HessianSuiteReport hessian_inequality_field(const MetricField& g, const ScalarField& w, Stencil stencil,
                                            double tolerance, double gradient_cutoff = 1e-8);

// ------------------------------------------------------------ radial estimates

/// Smooth cutoff eta(d) = 1 for d <= s1, 0 for d >= s2, smoothstep in between.
struct CutoffProfile {
  double s1 = 1.0;
  double s2 = 2.0;
  double c_cut = 2.0;  // recorded bound |eta'| <= c_cut / (s2 - s1); the smoothstep attains 1.5

  double value(double d) const;
  double slope(double d) const;  // d eta / d d
};

/// Both sides of the weighted integral estimate on the ball |r - center| < s
/// intersected with {R < 0}. `stated_*` use the closed radii; `cutoff_*` are
/// the bound before the cutoff is replaced by indicator functions:
///   int |R'|^2 |R|^alpha eta^2 <= (n-4)/(2(n-1)(1+alpha)) int |R|^{alpha+3} eta^2
///                                 + 4/(1+alpha)^2 int |R|^{alpha+2} eta'^2.
/// `identity_residual` is the integration-by-parts identity that feeds both.
struct IntegralEstimateReport {
  int n = 2;
  double alpha = 0.0;
  CutoffProfile cutoff;
  double criticality_residual = 0.0;  // relative sup of the integrated-R^2 gradient
  double stated_lhs = 0.0, stated_rhs = 0.0, stated_margin = 0.0;
  double cutoff_lhs = 0.0, cutoff_rhs = 0.0, cutoff_margin = 0.0;
  double identity_residual = 0.0;  // relative
};

/// R and R' come from the closed-form warped curvature. Throws
/// PreconditionError when the surface is not critical within
/// `criticality_tolerance` on the ball, or the ball leaves the sampled interval.
IntegralEstimateReport integral_estimate_check(const WarpedProductMetric& surface, double center, double alpha,
                                               CutoffProfile cutoff, double criticality_tolerance = 1e-6);

struct GradientEstimateReport {
  double sup_ratio_square = 0.0;  // sup |grad R|^2 / R^2
  double sup_ratio_cube = 0.0;    // sup |grad R|^2 / |R|^3
  double inf_ratio_cube = 0.0;
};

/// Over the nodes with index in [first, last). Throws PreconditionError if R >= 0 there.
GradientEstimateReport gradient_estimate_probe(const WarpedProductMetric& surface, std::size_t first,
                                               std::size_t last);

struct DecayEnvelopeReport {
  double c_measured = 0.0;  // max |d(u^{-1/2})/dr| by finite differences
  double c_used = 0.0;
  bool hypothesis_holds = true;
  std::optional<std::size_t> violating_sample;  // where the slope bound fails
  double min_margin = 0.0;  // min u / envelope - 1
  bool holds = false;
};

/// Checks u(r) >= (u(r_O)^{-1/2} + c |r - r_O|)^{-2} on uniform samples.
/// Without `c` the measured slope bound is used.
DecayEnvelopeReport decay_envelope_check(std::span<const double> u, double spacing, std::size_t origin,
                                         std::optional<double> c = std::nullopt, double tolerance = 1e-9);

// ------------------------------------------------------------ Bochner inequality

/// Delta_f |grad f|^2 against (2n+2)/n |grad f|^4 - e^{-f} |grad f|^2 / 2.
struct BochnerReport {
  std::vector<double> lhs, rhs, residual;
  double min_residual = 0.0;
  double min_relative = 0.0;  // min residual / (1 + |lhs| + |rhs|)
  double criticality_residual = 0.0;
  bool asserted = false;
  bool holds = true;  // meaningful when asserted
};

/// Grid version. With `is_critical` the metric must pass the integrated-R^2
/// criticality test and have R < 0 (PreconditionError otherwise).
BochnerReport bochner_inequality_check(const MetricField& g, const ScalarField& f, bool is_critical,
                                       Stencil stencil = Stencil::Spectral, double tolerance = 1e-6);

/// Radial version on a warped product, f sampled on the profile grid; nodes in
/// [first, last) are evaluated.
BochnerReport bochner_inequality_check(const WarpedProductMetric& w, std::span<const double> f, bool is_critical,
                                       std::size_t first, std::size_t last, double tolerance = 1e-6);

/// Radial critical metric of integrated R^2 built by integrating
///   R'' = (n-4)/(4(n-1)) R^2 - (n-1) psi R',  phi'' = phi' R'/R - phi R/(4(n-1))
/// from phi(0) = 1, phi'(0) = p, R(0) = R0 < 0, with R'(0) fixed by the
/// first-order constraint
///   (n-2)(k - phi'^2)/phi^2 - 2 psi R'/R - R/(2(n-1)) = 0.
struct ManufacturedCritical {
  WarpedProductMetric metric;
  std::vector<double> scalar;   // R from the integration
  std::vector<double> dscalar;  // R'
  double constraint_residual = 0.0;  // max over samples
};

ManufacturedCritical manufactured_critical(int n, double R0, double p, double fiber_curvature, double r_hi,
                                           int samples, double fiber_volume = 1.0);

}  // namespace curvlab
