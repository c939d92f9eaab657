#include "curvlab/warped.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "curvlab/differentiation.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {

ProfileJet profile_derivatives(std::span<const double> samples, double spacing, bool periodic,
                               int stencil_points) {
  const int N = static_cast<int>(samples.size());
  ProfileJet jet;
  jet.d[0].assign(samples.begin(), samples.end());
  for (int m = 1; m <= 4; ++m) jet.d[static_cast<std::size_t>(m)].assign(samples.size(), 0.0);
  for (double v : samples)
    if (!std::isfinite(v)) throw NonFiniteError("profile sample is not finite", 0);

  if (periodic) {
    if (N < 8) throw ConfigurationError("periodic profile needs at least 8 samples");
    const auto st = PeriodicStencil::make(Stencil::Spectral, N, spacing * N);
    st.first(samples, jet.d[1]);
    st.second(samples, jet.d[2]);
    st.first(jet.d[2], jet.d[3]);
    st.second(jet.d[2], jet.d[4]);
    return jet;
  }

  const int W = stencil_points;
  if (W < 5) throw ConfigurationError("profile stencil needs at least 5 points");
  if (N < W) throw ConfigurationError("profile has fewer samples than its stencil width");
  // weights[(shift, m)] for a window starting `shift` nodes left of the target
  std::map<std::pair<int, int>, std::vector<double>> cache;
  std::vector<double> nodes(static_cast<std::size_t>(W));
  for (int i = 0; i < N; ++i) {
    const int start = std::clamp(i - W / 2, 0, N - W);
    const int shift = i - start;
    for (int m = 1; m <= 4; ++m) {
      auto key = std::make_pair(shift, m);
      auto it = cache.find(key);
      if (it == cache.end()) {
        for (int j = 0; j < W; ++j) nodes[static_cast<std::size_t>(j)] = static_cast<double>(j - shift);
        it = cache.emplace(key, fornberg_weights(m, 0.0, nodes)).first;
      }
      // weights sum to zero, so differencing against the target keeps constants exact
      const double u0 = samples[static_cast<std::size_t>(i)];
      double v = 0.0;
      for (int j = 0; j < W; ++j)
        v += it->second[static_cast<std::size_t>(j)] * (samples[static_cast<std::size_t>(start + j)] - u0);
      jet.d[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = v / std::pow(spacing, m);
    }
  }
  return jet;
}

double profile_integral(std::span<const double> f, double h, bool periodic) {
  const std::size_t N = f.size();
  double s = 0.0;
  double c = 0.0;
  auto add = [&](double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  };
  if (periodic) {
    for (double v : f) add(v);
    return (s + c) * h;
  }
  if (N < 8) throw ConfigurationError("profile quadrature needs at least 8 samples");
  for (std::size_t i = 0; i < N; ++i) add((i == 0 || i + 1 == N) ? 0.5 * f[i] : f[i]);
  // Gregory corrections with forward differences at the left end and
  // backward differences at the right end.
  const std::size_t e = N - 1;
  const double d1 = f[1] - f[0];
  const double d2 = f[2] - 2 * f[1] + f[0];
  const double d3 = f[3] - 3 * f[2] + 3 * f[1] - f[0];
  const double b1 = f[e] - f[e - 1];
  const double b2 = f[e] - 2 * f[e - 1] + f[e - 2];
  const double b3 = f[e] - 3 * f[e - 1] + 3 * f[e - 2] - f[e - 3];
  add(-(b1 - d1) / 12.0);
  add(-(b2 + d2) / 24.0);
  add(-19.0 * (b3 - d3) / 720.0);
  return (s + c) * h;
}

namespace {

ProfileJet sampled_jet(const std::vector<double>& phi, double r_lo, double r_hi,
                       const WarpedProductMetric::Options& opt) {
  if (phi.size() < 8) throw ConfigurationError("warped product needs at least 8 samples");
  const double count = static_cast<double>(phi.size());
  const double h = opt.periodic ? (r_hi - r_lo) / count : (r_hi - r_lo) / (count - 1.0);
  return profile_derivatives(phi, h, opt.periodic, opt.stencil_points);
}

}  // namespace

WarpedProductMetric::WarpedProductMetric(int n, double r_lo, double r_hi, ProfileJet jet, Options options)
    : n_(n), r_lo_(r_lo), r_hi_(r_hi), h_(0.0), opt_(options), jet_(std::move(jet)) {
  if (n_ < 2) throw ConfigurationError("warped product needs dimension >= 2");
  if (!(r_lo_ < r_hi_)) throw ConfigurationError("warped product needs r_lo < r_hi");
  if (jet_.size() < 8) throw ConfigurationError("warped product needs at least 8 samples");
  if (!(opt_.fiber_volume > 0.0)) throw ConfigurationError("fiber volume must be positive");
  const double count = static_cast<double>(jet_.size());
  h_ = opt_.periodic ? (r_hi_ - r_lo_) / count : (r_hi_ - r_lo_) / (count - 1.0);
  for (std::size_t i = 0; i < jet_.size(); ++i)
    if (!(jet_.d[0][i] > 0.0)) throw DegenerateMetricError("warping function is not positive", i);
}

WarpedProductMetric::WarpedProductMetric(int dimension, double r_lo, double r_hi, std::vector<double> phi,
                                         Options options)
    : WarpedProductMetric(dimension, r_lo, r_hi, sampled_jet(phi, r_lo, r_hi, options), options) {}

WarpedProductMetric WarpedProductMetric::from_jet(int dimension, double r_lo, double r_hi, int samples,
                                                  const std::function<std::array<double, 5>(double)>& jet,
                                                  Options options) {
  if (samples < 8) throw ConfigurationError("warped product needs at least 8 samples");
  ProfileJet pj;
  for (auto& v : pj.d) v.resize(static_cast<std::size_t>(samples));
  const double h = options.periodic ? (r_hi - r_lo) / samples : (r_hi - r_lo) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const auto j = jet(r_lo + h * i);
    for (int m = 0; m < 5; ++m) pj.d[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(m)];
  }
  return WarpedProductMetric(dimension, r_lo, r_hi, std::move(pj), options);
}

WarpedProductMetric WarpedProductMetric::from_hermite(int dimension, double r_lo, double r_hi, std::vector<double> phi,
                                                      std::vector<double> dphi, Options options) {
  if (phi.size() != dphi.size()) throw ConfigurationError("profile and slope sample counts differ");
  if (phi.size() < 8) throw ConfigurationError("warped product needs at least 8 samples");
  const double count = static_cast<double>(phi.size());
  const double h = options.periodic ? (r_hi - r_lo) / count : (r_hi - r_lo) / (count - 1.0);
  const auto slope = profile_derivatives(dphi, h, options.periodic, options.stencil_points);
  ProfileJet pj;
  pj.d[0] = std::move(phi);
  pj.d[1] = std::move(dphi);
  for (int m = 2; m <= 4; ++m) pj.d[static_cast<std::size_t>(m)] = slope.d[static_cast<std::size_t>(m - 1)];
  return WarpedProductMetric(dimension, r_lo, r_hi, std::move(pj), options);
}

WarpedProductMetric WarpedProductMetric::with_profile(std::vector<double> phi) const {
  return WarpedProductMetric(n_, r_lo_, r_hi_, std::move(phi), opt_);
}

double WarpedProductMetric::integrate(std::span<const double> values) const {
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = values[i] * std::pow(jet_.d[0][i], n_ - 1);
  return opt_.fiber_volume * profile_integral(w, h_, opt_.periodic);
}

ProfileJet WarpedProductMetric::derivatives(std::span<const double> values) const {
  return profile_derivatives(values, h_, opt_.periodic, opt_.stencil_points);
}

WarpedCurvature warped_curvature(const WarpedProductMetric& w) {
  const auto& J = w.jet().d;
  const std::size_t N = w.size();
  const double n = w.dimension();
  const double k = w.fiber_curvature();
  WarpedCurvature c;
  for (auto* v : {&c.radial_sectional, &c.tangential_sectional, &c.ricci_radial, &c.ricci_tangential, &c.scalar,
                  &c.mean_curvature, &c.dA, &c.ddA, &c.dB, &c.ddB, &c.dR, &c.ddR})
    v->resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double p = J[0][i], p1 = J[1][i], p2 = J[2][i], p3 = J[3][i], p4 = J[4][i];
    const double q = p2 / p;
    const double q1 = p3 / p - p2 * p1 / (p * p);
    const double q2 = p4 / p - 2 * p3 * p1 / (p * p) - p2 * p2 / (p * p) + 2 * p2 * p1 * p1 / (p * p * p);
    const double s = (k - p1 * p1) / (p * p);
    const double s1 = -2 * p1 * p2 / (p * p) - 2 * (k - p1 * p1) * p1 / (p * p * p);
    const double s2 = -2 * (p2 * p2 + p1 * p3) / (p * p) + 4 * p1 * p1 * p2 / (p * p * p) -
                      2 * (-2 * p1 * p1 * p2 + (k - p1 * p1) * p2) / (p * p * p) +
                      6 * (k - p1 * p1) * p1 * p1 / (p * p * p * p);
    c.radial_sectional[i] = -q;
    c.tangential_sectional[i] = s;
    c.ricci_radial[i] = -(n - 1) * q;
    c.ricci_tangential[i] = -q + (n - 2) * s;
    c.scalar[i] = c.ricci_radial[i] + (n - 1) * c.ricci_tangential[i];
    c.mean_curvature[i] = p1 / p;
    c.dA[i] = -(n - 1) * q1;
    c.ddA[i] = -(n - 1) * q2;
    c.dB[i] = -q1 + (n - 2) * s1;
    c.ddB[i] = -q2 + (n - 2) * s2;
    c.dR[i] = c.dA[i] + (n - 1) * c.dB[i];
    c.ddR[i] = c.ddA[i] + (n - 1) * c.ddB[i];
  }
  return c;
}

RadialHessian radial_hessian_from(const WarpedProductMetric& w, std::span<const double> du,
                                  std::span<const double> ddu) {
  const std::size_t N = w.size();
  const auto& J = w.jet().d;
  RadialHessian out{std::vector<double>(du.begin(), du.end()), std::vector<double>(ddu.begin(), ddu.end()),
                    std::vector<double>(N), std::vector<double>(N)};
  for (std::size_t i = 0; i < N; ++i) {
    const double psi = J[1][i] / J[0][i];
    out.tangential[i] = psi * du[i];
    out.laplacian[i] = ddu[i] + (w.dimension() - 1) * psi * du[i];
  }
  return out;
}

RadialHessian radial_hessian(const WarpedProductMetric& w, std::span<const double> u) {
  const auto j = w.derivatives(u);
  return radial_hessian_from(w, j.d[1], j.d[2]);
}

}  // namespace curvlab
