#include "curvlab/rigidity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/numeric/odeint.hpp>

#include "curvlab/errors.hpp"
#include "curvlab/functionals.hpp"

namespace curvlab {

namespace {

using boost::multiprecision::cpp_int;

void require_n(int n) {
  if (n <= 4) throw DomainError("rigidity constants need n > 4, got n = " + std::to_string(n));
}

// Local six-point Lagrange interpolation of uniform samples.
class UniformInterpolant {
 public:
  UniformInterpolant(double r_lo, double h, std::size_t size) : r_lo_(r_lo), h_(h), size_(size) {}

  double operator()(const std::vector<double>& v, double r) const {
    constexpr int m = 6;
    const double x = (r - r_lo_) / h_;
    long start = static_cast<long>(std::floor(x)) - m / 2 + 1;
    start = std::clamp(start, 0L, static_cast<long>(size_) - m);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      double w = 1.0;
      for (int k = 0; k < m; ++k)
        if (k != j) w *= (x - static_cast<double>(start + k)) / static_cast<double>(j - k);
      sum += w * v[static_cast<std::size_t>(start + j)];
    }
    return sum;
  }

  // Integral over [lo, hi] with Gauss-Legendre on every grid cell, split at `breaks`.
  template <class F>
  double integrate(double lo, double hi, std::vector<double> breaks, F&& fn) const {
    for (std::size_t i = 0; i <= size_; ++i) breaks.push_back(r_lo_ + h_ * static_cast<double>(i));
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double a = std::max(breaks[i], lo), b = std::min(breaks[i + 1], hi);
      if (b - a <= 1e-14 * h_) continue;
      total += boost::math::quadrature::gauss<double, 10>::integrate(fn, a, b);
    }
    return total;
  }

 private:
  double r_lo_, h_;
  std::size_t size_;
};

std::string str(const cpp_int& v) { return v.str(); }

// max |G|_g of the integrated-R^2 gradient over [first, last), divided by max R^2 there.
double relative_criticality(const WarpedProductMetric& w, const std::vector<double>& R, std::size_t first,
                            std::size_t last) {
  const auto G = warped_gradient(w, SigmaOnly{});
  const double n1 = w.dimension() - 1;
  double sup = 0.0, scale = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    sup = std::max(sup, std::sqrt(G.radial[i] * G.radial[i] + n1 * G.tangential[i] * G.tangential[i]));
    scale = std::max(scale, R[i] * R[i]);
  }
  if (sup == 0.0) return 0.0;
  return sup / std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace

// ------------------------------------------------------------ constants

RigidityConstants compute_constants(int n) {
  require_n(n);
  const cpp_int N = n;
  const cpp_int a = 4 * (N - 1) * (N - 3) * (N - 3);
  const cpp_int b = 4 * (N * N * N + N * N - 29 * N + 27);
  const cpp_int c = N * N * N - 11 * N * N + 55 * N - 81;
  const cpp_int d2 = b * b - 4 * a * c;
  const cpp_int d2_factored = 64 * N * (N - 1) * (N - 4) * (N * (5 * N - 26) + 9);

  RigidityConstants k;
  k.n = n;
  k.a_exact = str(a);
  k.b_exact = str(b);
  k.c_exact = str(c);
  k.delta2_exact = str(d2);
  k.delta2_agree = d2 == d2_factored;
  k.a = a.convert_to<double>();
  k.b = b.convert_to<double>();
  k.c = c.convert_to<double>();
  k.delta2 = d2.convert_to<double>();

  const double root = std::sqrt(k.delta2);
  k.A_lo = (k.b - root) / (2.0 * k.a);
  k.A_hi = (k.b + root) / (2.0 * k.a);
  k.C = k.A_lo;
  k.q_star = (n - 4.0) / (4.0 * k.C * (n - 1.0)) + 2.0;
  k.q_star_closed = 2.0 + 2.0 * (n - 3.0) * (n - 3.0) * (n - 4.0) / (k.b - root);
  return k;
}

QuadraticCoefficients quadratic_coefficients(int n, double A) {
  require_n(n);
  const double m = n - 1.0;
  QuadraticCoefficients q;
  q.alpha = (n - 4.0) * (2.0 * A * (n * n - 1.0) + n - 4.0) / (16.0 * m * m * m);
  q.beta = (2.0 * A * m * (n - 3.0) + n * n - 4.0 * n + 9.0) / (4.0 * m * m);
  q.gamma = n / m;
  q.delta1 = q.beta * q.beta - 4.0 * q.alpha * q.gamma;
  return q;
}

NegativityReport quadratic_negativity(int n, double A, double t_range, int samples) {
  const auto k = compute_constants(n);
  NegativityReport rep;
  rep.q = quadratic_coefficients(n, A);
  const double m = n - 1.0;
  rep.delta1_factored = (k.a * A * A - k.b * A + k.c) / (16.0 * m * m * m);

  const auto& q = rep.q;
  const auto quad = [&](double t) { return -q.alpha * t * t + q.beta * t - q.gamma; };

  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  const double dt = 2.0 * t_range / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double v = quad(-t_range + dt * i);
    if (v > best) best = v, arg = static_cast<std::size_t>(i);
  }
  const double t0 = -t_range + dt * static_cast<double>(arg);
  const auto refined = boost::math::tools::brent_find_minima([&](double t) { return -quad(t); }, t0 - dt,
                                                             t0 + dt, std::numeric_limits<double>::digits);
  rep.sampled_argmax = refined.first;
  rep.sampled_max = std::max(best, -refined.second);

  const bool inside = A > k.A_lo && A < k.A_hi && rep.delta1_factored < 0.0 && q.alpha > 0.0;
  if (inside) {
    rep.lambda = q.gamma - q.beta * q.beta / (4.0 * q.alpha);
    rep.vertex_gap = std::abs(rep.sampled_max + *rep.lambda);
    rep.sampled_below = rep.sampled_max <= -*rep.lambda + 1e-12;
  }
  return rep;
}

std::vector<double> interior_points(const RigidityConstants& k, int count) {
  std::vector<double> out;
  for (int j = 1; j <= count; ++j) out.push_back(k.A_lo + (k.A_hi - k.A_lo) * j / (count + 1.0));
  return out;
}

// -------------------------------------------------------- Hessian inequality

HessianSample hessian_inequality_check(std::span<const double> v, std::span<const double> H,
                                       std::span<const double> X, std::span<const double> G) {
  const std::size_t n = v.size();
  if (H.size() != n * n || X.size() != n || G.size() != n * n)
    throw DimensionError("hessian_inequality_check: inconsistent sizes");
  std::vector<double> GH(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) GH[i * n + j] += G[i * n + k] * H[k * n + j];
  double norm2 = 0.0, lap = 0.0, grad2 = 0.0, pair = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lap += GH[i * n + i];
    for (std::size_t j = 0; j < n; ++j) {
      norm2 += GH[i * n + j] * GH[j * n + i];
      grad2 += v[i] * G[i * n + j] * v[j];
      pair += X[i] * G[i * n + j] * v[j];
    }
  }
  if (!(grad2 > 0.0)) throw PreconditionError("Hessian inequality needs a nonzero gradient");
  const double m = static_cast<double>(n) - 1.0;
  const double drift = lap * pair / (m * grad2);
  HessianSample s;
  s.lhs = norm2;
  s.rhs = lap * lap / m - drift;
  s.residual = s.lhs - s.rhs;
  s.scale = norm2 + lap * lap / m + std::abs(drift);
  return s;
}

HessianSample hessian_inequality_check(std::span<const double> gradient, std::span<const double> hessian,
                                       std::span<const double> grad_normsq) {
  const std::size_t n = gradient.size();
  std::vector<double> id(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
  return hessian_inequality_check(gradient, hessian, grad_normsq, id);
}

HessianSuiteReport hessian_inequality_field(const MetricField& g, const ScalarField& w, Stencil stencil,
                                            double tolerance, double gradient_cutoff) {
  const auto core = curvature_core(g, stencil);
  const auto hl = hessian_laplacian(w, core);
  const int n = g.dimension();
  const auto& grid = g.grid();
  const std::size_t N = grid.node_count();
  const auto nn = static_cast<std::size_t>(n);

  std::vector<double> normsq(N, 0.0);
  for (std::size_t p = 0; p < N; ++p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        normsq[p] += core.inverse.at(p, i, j) * hl.gradient[i][p] * hl.gradient[j][p];
  const Differentiator D(grid, stencil);
  std::vector<std::vector<double>> X;
  for (int a = 0; a < n; ++a) X.push_back(D.first(normsq, a));

  HessianSuiteReport rep;
  std::vector<double> v(nn), H(nn * nn), x(nn), G(nn * nn);
  for (std::size_t p = 0; p < N; ++p) {
    if (normsq[p] < gradient_cutoff) {
      ++rep.skipped;
      continue;
    }
    for (int i = 0; i < n; ++i) {
      v[i] = hl.gradient[i][p];
      x[i] = X[i][p];
    }
    hl.hessian.gather(p, H);
    core.inverse.gather(p, G);
    const auto s = hessian_inequality_check(v, H, x, G);
    const double rel = s.residual / (1.0 + s.scale);
    ++rep.samples;
    if (rel < -tolerance) ++rep.violations;
    rep.worst_relative = rep.samples == 1 ? rel : std::min(rep.worst_relative, rel);
  }
  return rep;
}

// ------------------------------------------------------------ radial estimates

double CutoffProfile::value(double d) const {
  if (d <= s1) return 1.0;
  if (d >= s2) return 0.0;
  const double x = (d - s1) / (s2 - s1);
  return 1.0 - x * x * (3.0 - 2.0 * x);
}

double CutoffProfile::slope(double d) const {
  if (d <= s1 || d >= s2) return 0.0;
  const double x = (d - s1) / (s2 - s1);
  return -6.0 * x * (1.0 - x) / (s2 - s1);
}

IntegralEstimateReport integral_estimate_check(const WarpedProductMetric& w, double center, double alpha,
                                               CutoffProfile cut, double criticality_tolerance) {
  if (!(alpha > -1.0)) throw PreconditionError("integral estimate needs alpha > -1");
  if (!(cut.s1 > 0.0 && cut.s2 > cut.s1)) throw PreconditionError("integral estimate needs 0 < s1 < s2");
  if (center - cut.s2 < w.r_lo() || center + cut.s2 > w.r_hi())
    throw PreconditionError("ball of radius s2 leaves the sampled interval");

  const auto curv = warped_curvature(w);
  const auto& R = curv.scalar;
  const auto& dR = curv.dR;
  const int n = w.dimension();

  const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((center - cut.s2 - w.r_lo()) / w.spacing())));
  const auto last = std::min(w.size(), static_cast<std::size_t>(std::ceil((center + cut.s2 - w.r_lo()) / w.spacing())) + 1);

  IntegralEstimateReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.cutoff = cut;
  rep.criticality_residual = relative_criticality(w, R, first, last);
  if (!(rep.criticality_residual < criticality_tolerance))
    throw PreconditionError("surface is not critical for integrated R^2: relative gradient residual " +
                            std::to_string(rep.criticality_residual));

  const UniformInterpolant I(w.r_lo(), w.spacing(), w.size());
  const auto& phi = w.phi();
  const double vol = w.options().fiber_volume;
  const double kappa = (n - 4.0) / (4.0 * (n - 1.0));
  const double a1 = 1.0 + alpha;

  // |R| restricted to {R < 0}, R', volume density and cutoff at r.
  struct Point {
    double absR, dR, dV, eta, deta;
  };
  const auto at = [&](double r) {
    const double Rv = I(R, r);
    const double d = std::abs(r - center);
    return Point{Rv < 0.0 ? -Rv : 0.0, I(dR, r), std::pow(I(phi, r), n - 1) * vol, cut.value(d),
                 cut.slope(d) * (r >= center ? 1.0 : -1.0)};
  };
  const auto pw = [](double x, double e) { return x > 0.0 ? std::pow(x, e) : 0.0; };
  const std::vector<double> breaks{center - cut.s2, center - cut.s1, center, center + cut.s1, center + cut.s2};
  const auto integral = [&](double s, auto&& fn) {
    return I.integrate(center - s, center + s, breaks, [&](double r) {
      const Point p = at(r);
      return fn(p) * p.dV;
    });
  };
  const auto neg = [](const Point& p) { return p.absR > 0.0 ? 1.0 : 0.0; };

  rep.stated_lhs = integral(cut.s1, [&](const Point& p) { return neg(p) * p.dR * p.dR * pw(p.absR, alpha); });
  const double I3 = integral(cut.s2, [&](const Point& p) { return pw(p.absR, alpha + 3.0); });
  const double I2 = integral(cut.s2, [&](const Point& p) { return pw(p.absR, alpha + 2.0); });
  const double gap = cut.s2 - cut.s1;
  rep.stated_rhs = 2.0 * kappa / a1 * I3 + 4.0 / (a1 * a1 * gap * gap) * I2;
  rep.stated_margin = rep.stated_rhs - rep.stated_lhs;

  rep.cutoff_lhs =
      integral(cut.s2, [&](const Point& p) { return neg(p) * p.dR * p.dR * pw(p.absR, alpha) * p.eta * p.eta; });
  const double J3 = integral(cut.s2, [&](const Point& p) { return pw(p.absR, alpha + 3.0) * p.eta * p.eta; });
  const double J2 = integral(cut.s2, [&](const Point& p) { return pw(p.absR, alpha + 2.0) * p.deta * p.deta; });
  const double J1 = integral(cut.s2, [&](const Point& p) { return pw(p.absR, alpha + 1.0) * p.eta * p.dR * p.deta; });
  rep.cutoff_rhs = 2.0 * kappa / a1 * J3 + 4.0 / (a1 * a1) * J2;
  rep.cutoff_margin = rep.cutoff_rhs - rep.cutoff_lhs;

  const double ident = (kappa * J3 + 2.0 * J1) / a1;
  const double ident_scale = std::abs(rep.cutoff_lhs) + std::abs(kappa * J3 / a1) + std::abs(2.0 * J1 / a1);
  rep.identity_residual = ident_scale > 0.0 ? std::abs(rep.cutoff_lhs - ident) / ident_scale : 0.0;
  return rep;
}

GradientEstimateReport gradient_estimate_probe(const WarpedProductMetric& w, std::size_t first, std::size_t last) {
  if (first >= last || last > w.size()) throw PreconditionError("gradient_estimate_probe: empty node range");
  const auto curv = warped_curvature(w);
  GradientEstimateReport rep;
  rep.inf_ratio_cube = std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i < last; ++i) {
    const double R = curv.scalar[i];
    if (!(R < 0.0))
      throw PreconditionError("gradient_estimate_probe needs R < 0, node " + std::to_string(i) + " has R = " +
                              std::to_string(R));
    const double g2 = curv.dR[i] * curv.dR[i];
    rep.sup_ratio_square = std::max(rep.sup_ratio_square, g2 / (R * R));
    const double cube = g2 / std::abs(R * R * R);
    rep.sup_ratio_cube = std::max(rep.sup_ratio_cube, cube);
    rep.inf_ratio_cube = std::min(rep.inf_ratio_cube, cube);
  }
  return rep;
}

DecayEnvelopeReport decay_envelope_check(std::span<const double> u, double h, std::size_t origin,
                                         std::optional<double> c, double tolerance) {
  if (origin >= u.size()) throw PreconditionError("decay_envelope_check: origin outside the samples");
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw PreconditionError("decay_envelope_check needs u > 0, sample " + std::to_string(i));
    v[i] = 1.0 / std::sqrt(u[i]);
  }
  const auto jet = profile_derivatives(v, h, false);

  DecayEnvelopeReport rep;
  std::size_t steepest = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(jet.d[1][i]) > rep.c_measured) rep.c_measured = std::abs(jet.d[1][i]), steepest = i;
  rep.c_used = c.value_or(rep.c_measured);
  if (c && rep.c_measured > *c + tolerance * (1.0 + *c)) {
    rep.hypothesis_holds = false;
    rep.violating_sample = steepest;
  }
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = h * std::abs(static_cast<double>(i) - static_cast<double>(origin));
    const double e = v[origin] + rep.c_used * d;
    rep.min_margin = std::min(rep.min_margin, u[i] * e * e - 1.0);
  }
  rep.holds = rep.hypothesis_holds && rep.min_margin >= -tolerance;
  return rep;
}

// ------------------------------------------------------------ Bochner inequality

namespace {

void finish_bochner(BochnerReport& rep, bool asserted, double tolerance) {
  rep.asserted = asserted;
  rep.residual.resize(rep.lhs.size());
  rep.min_residual = std::numeric_limits<double>::infinity();
  rep.min_relative = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
    rep.residual[i] = rep.lhs[i] - rep.rhs[i];
    rep.min_residual = std::min(rep.min_residual, rep.residual[i]);
    rep.min_relative =
        std::min(rep.min_relative, rep.residual[i] / (1.0 + std::abs(rep.lhs[i]) + std::abs(rep.rhs[i])));
  }
  rep.holds = !asserted || rep.min_relative >= -tolerance;
}

double bochner_rhs(int n, double f, double grad2) {
  return (2.0 * n + 2.0) / n * grad2 * grad2 - 0.5 * std::exp(-f) * grad2;
}

}  // namespace

BochnerReport bochner_inequality_check(const MetricField& g, const ScalarField& f, bool is_critical,
                                       Stencil stencil, double tolerance) {
  const auto core = curvature_core(g, stencil);
  const int n = g.dimension();
  BochnerReport rep;
  if (is_critical) {
    const auto G = grad_s2(g, stencil);
    const double scale = std::max(core.scalar.max_abs() * core.scalar.max_abs(), std::numeric_limits<double>::min());
    rep.criticality_residual = G.sup_norm == 0.0 ? 0.0 : G.sup_norm / scale;
    if (!(rep.criticality_residual < tolerance))
      throw PreconditionError("metric is not critical for integrated R^2: relative gradient residual " +
                              std::to_string(rep.criticality_residual));
    if (!(core.scalar.max() < 0.0)) throw PreconditionError("Bochner check needs R < 0 everywhere");
  }
  const auto hl = hessian_laplacian(f, core);
  const std::size_t N = g.grid().node_count();
  ScalarField grad2(g.grid());
  for (std::size_t p = 0; p < N; ++p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) grad2[p] += core.inverse.at(p, i, j) * hl.gradient[i][p] * hl.gradient[j][p];
  const auto lhs = drift_laplacian(grad2, f, core);
  rep.lhs.assign(lhs.values().begin(), lhs.values().end());
  rep.rhs.resize(N);
  for (std::size_t p = 0; p < N; ++p) rep.rhs[p] = bochner_rhs(n, f[p], grad2[p]);
  finish_bochner(rep, is_critical, tolerance);
  return rep;
}

BochnerReport bochner_inequality_check(const WarpedProductMetric& w, std::span<const double> f, bool is_critical,
                                       std::size_t first, std::size_t last, double tolerance) {
  if (f.size() != w.size()) throw DimensionError("Bochner check: f has the wrong number of samples");
  if (first >= last || last > w.size()) throw PreconditionError("Bochner check: empty node range");
  const int n = w.dimension();
  BochnerReport rep;
  if (is_critical) {
    const auto curv = warped_curvature(w);
    rep.criticality_residual = relative_criticality(w, curv.scalar, first, last);
    if (!(rep.criticality_residual < tolerance))
      throw PreconditionError("metric is not critical for integrated R^2: relative gradient residual " +
                              std::to_string(rep.criticality_residual));
    for (std::size_t i = first; i < last; ++i)
      if (!(curv.scalar[i] < 0.0)) throw PreconditionError("Bochner check needs R < 0, node " + std::to_string(i));
  }
  const auto fj = w.derivatives(f);
  std::vector<double> grad2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) grad2[i] = fj.d[1][i] * fj.d[1][i];
  const auto uj = w.derivatives(grad2);
  const auto& jet = w.jet();
  for (std::size_t i = first; i < last; ++i) {
    const double psi = jet.d[1][i] / jet.d[0][i];
    rep.lhs.push_back(uj.d[2][i] + (n - 1) * psi * uj.d[1][i] - fj.d[1][i] * uj.d[1][i]);
    rep.rhs.push_back(bochner_rhs(n, f[i], grad2[i]));
  }
  finish_bochner(rep, is_critical, tolerance);
  return rep;
}

ManufacturedCritical manufactured_critical(int n, double R0, double p, double k, double r_hi, int samples,
                                           double fiber_volume) {
  if (n < 3) throw DimensionError("manufactured_critical needs n >= 3");
  if (!(R0 < 0.0) || p == 0.0 || !(r_hi > 0.0) || samples < 12)
    throw PreconditionError("manufactured_critical: need R0 < 0, p != 0, r_hi > 0 and at least 12 samples");
  const double m = n - 1.0;
  const double kappa = (n - 4.0) / (4.0 * m);
  using State = std::array<double, 4>;  // R, R', phi, phi'
  const auto rhs = [&](const State& x, State& dx, double) {
    const double psi = x[3] / x[2];
    dx[0] = x[1];
    dx[1] = kappa * x[0] * x[0] - m * psi * x[1];
    dx[2] = x[3];
    dx[3] = x[3] * x[1] / x[0] - x[2] * x[0] / (4.0 * m);
  };
  State x{R0, R0 * ((n - 2.0) * (k - p * p) - R0 / (2.0 * m)) / (2.0 * p), 1.0, p};

  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) times[static_cast<std::size_t>(i)] = r_hi * i / (samples - 1.0);
  std::vector<double> R, dR, phi, dphi;
  namespace ode = boost::numeric::odeint;
  ode::integrate_times(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>()), rhs, x, times.begin(),
                       times.end(), 1e-4, [&](const State& s, double) {
                         R.push_back(s[0]);
                         dR.push_back(s[1]);
                         phi.push_back(s[2]);
                         dphi.push_back(s[3]);
                       });

  double constraint = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (!(phi[i] > 0.0) || !(R[i] < 0.0) || !std::isfinite(R[i]))
      throw PreconditionError("manufactured_critical: profile leaves phi > 0, R < 0 at sample " + std::to_string(i));
    const double psi = dphi[i] / phi[i];
    constraint = std::max(constraint, std::abs((n - 2.0) * (k - dphi[i] * dphi[i]) / (phi[i] * phi[i]) -
                                               2.0 * psi * dR[i] / R[i] - R[i] / (2.0 * m)));
  }
  WarpedProductMetric::Options opt;
  opt.fiber_curvature = k;
  opt.fiber_volume = fiber_volume;
  return ManufacturedCritical{WarpedProductMetric::from_hermite(n, 0.0, r_hi, phi, dphi, opt), std::move(R),
                              std::move(dR), constraint};
}

}  // namespace curvlab
