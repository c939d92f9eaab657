#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace curvlab {

/// Derivatives 0..4 of a sampled one-dimensional function.
struct ProfileJet {
  std::array<std::vector<double>, 5> d;

  const std::vector<double>& value() const { return d[0]; }
  std::size_t size() const { return d[0].size(); }
};

/// Derivatives of samples on a uniform grid. Periodic samples (spacing
/// L/N, no repeated endpoint) use the full-width periodic stencil; otherwise
/// `stencil_points`-wide Fornberg stencils, centred in the interior and
/// shifted one-sided near the ends.
ProfileJet profile_derivatives(std::span<const double> samples, double spacing, bool periodic,
                               int stencil_points = 11);

/// Quadrature of samples on a uniform grid: node sum for periodic samples,
/// trapezoid with Gregory end corrections (exact through cubics) otherwise.
double profile_integral(std::span<const double> samples, double spacing, bool periodic);

/// dr^2 + phi(r)^2 g_Sigma with Sigma an (n-1)-dimensional space form of
/// sectional curvature k and total volume `fiber_volume`.
class WarpedProductMetric {
 public:
  struct Options {
    double fiber_curvature = 0.0;
    double fiber_volume = 1.0;
    bool periodic = false;
    int stencil_points = 11;
  };

  /// Samples on a uniform r-grid over [r_lo, r_hi] (both ends included), or
  /// over [r_lo, r_hi) when periodic.
  WarpedProductMetric(int dimension, double r_lo, double r_hi, std::vector<double> phi, Options options);

  /// Profile with analytic derivatives: `jet(r)` returns phi and its first
  /// four derivatives.
  static WarpedProductMetric from_jet(int dimension, double r_lo, double r_hi, int samples,
                                      const std::function<std::array<double, 5>(double)>& jet,
                                      Options options);

  /// Profile values and slopes; higher derivatives come from the slopes.
  static WarpedProductMetric from_hermite(int dimension, double r_lo, double r_hi, std::vector<double> phi,
                                          std::vector<double> dphi, Options options);

  int dimension() const { return n_; }
  double r_lo() const { return r_lo_; }
  double r_hi() const { return r_hi_; }
  std::size_t size() const { return jet_.size(); }
  double spacing() const { return h_; }
  double r(std::size_t i) const { return r_lo_ + h_ * static_cast<double>(i); }
  const std::vector<double>& phi() const { return jet_.d[0]; }
  const ProfileJet& jet() const { return jet_; }
  const Options& options() const { return opt_; }
  double fiber_curvature() const { return opt_.fiber_curvature; }
  bool periodic() const { return opt_.periodic; }

  /// Same interval, grid and options with new samples.
  WarpedProductMetric with_profile(std::vector<double> phi) const;

  /// Integral of samples against dV = phi^{n-1} dr * fiber_volume.
  double integrate(std::span<const double> values) const;
  /// Derivatives of a radial function sampled on this grid.
  ProfileJet derivatives(std::span<const double> values) const;

 private:
  WarpedProductMetric(int n, double r_lo, double r_hi, ProfileJet jet, Options options);

  int n_;
  double r_lo_;
  double r_hi_;
  double h_;
  Options opt_;
  ProfileJet jet_;
};

/// Closed-form curvature of a warped product in the orthonormal frame
/// {dr, fiber directions}. Every array has one entry per sample.
struct WarpedCurvature {
  std::vector<double> radial_sectional;      // -phi''/phi
  std::vector<double> tangential_sectional;  // (k - phi'^2)/phi^2
  std::vector<double> ricci_radial;          // A = (n-1) radial_sectional
  std::vector<double> ricci_tangential;      // B
  std::vector<double> scalar;                // A + (n-1) B
  std::vector<double> mean_curvature;        // psi = phi'/phi
  // First and second radial derivatives of A, B and R (analytic in the jets).
  std::vector<double> dA, ddA, dB, ddB, dR, ddR;
};

WarpedCurvature warped_curvature(const WarpedProductMetric& w);

/// Radial Hessian of a function u(r): rr component u'', fiber component
/// psi u' (orthonormal frame), Laplacian u'' + (n-1) psi u'.
struct RadialHessian {
  std::vector<double> du, radial, tangential, laplacian;
};

RadialHessian radial_hessian(const WarpedProductMetric& w, std::span<const double> u);
/// Same from supplied first and second derivatives.
RadialHessian radial_hessian_from(const WarpedProductMetric& w, std::span<const double> du,
                                  std::span<const double> ddu);

}  // namespace curvlab
