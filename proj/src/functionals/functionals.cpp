#include "curvlab/functionals.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/metric_ops.hpp"

namespace curvlab {

std::string to_string(const FunctionalSpec& spec) {
  if (std::holds_alternative<SigmaOnly>(spec)) return "sigma";
  char buf[48];
  std::snprintf(buf, sizeof buf, "t=%.17g", std::get<FiniteT>(spec).t);
  return buf;
}

FunctionalSpec spec_from_string(const std::string& text) {
  if (text == "sigma" || text == "s2" || text == "inf" || text == "+inf") return SigmaOnly{};
  std::string s = text.rfind("t=", 0) == 0 ? text.substr(2) : text;
  if (s == "-1/3") return FiniteT{-1.0 / 3.0};
  if (s == "-1/4") return FiniteT{-0.25};
  if (s == "-3/8") return FiniteT{-3.0 / 8.0};
  try {
    std::size_t used = 0;
    const double t = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(t)) throw ConfigurationError("bad functional '" + text + "'");
    return FiniteT{t};
  } catch (const std::logic_error&) {
    throw ConfigurationError("bad functional '" + text + "'");
  }
}

GradientTerms gradient_terms(const MetricField& g, Stencil stencil) {
  auto core = curvature_core(g, stencil);
  auto lap = rough_laplacian(core.ricci, core);
  auto hess = hessian_laplacian(core.scalar, core);
  return GradientTerms{std::move(core), std::move(lap), std::move(hess)};
}

double functional_value(const CurvatureCore& core, const FunctionalSpec& spec) {
  const auto& R = core.scalar;
  std::vector<double> v(R.size());
  if (const auto* ft = std::get_if<FiniteT>(&spec)) {
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = core.ricci_norm2[p] + ft->t * R[p] * R[p];
  } else {
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = R[p] * R[p];
  }
  return integrate_with_density(v, core.density, R.grid().cell_volume());
}

double functional_value(const MetricField& g, const FunctionalSpec& spec, Stencil stencil) {
  return functional_value(curvature_core(g, stencil), spec);
}

namespace {

GradientReport finish_report(TensorField2 G, const CurvatureCore& core, double value) {
  GradientReport r{std::move(G), ScalarField(core.scalar.grid()), 0.0, 0.0, value};
  r.gradient.require_finite("gradient");
  r.trace = metric_trace(r.gradient, core.inverse);
  const auto n2 = tensor_norm_squared(r.gradient, core.inverse);
  double sup = 0.0;
  for (std::size_t p = 0; p < n2.size(); ++p) sup = std::max(sup, n2[p]);
  r.sup_norm = std::sqrt(sup);
  r.l2_norm = std::sqrt(std::max(0.0, integrate_with_density(n2.values(), core.density, n2.grid().cell_volume())));
  return r;
}

// Coefficients of the generic assembly
//   G = -a_lap Lap(Ric) + a_hess Hess R + a_dr (Delta R) g + (b_ric2 |Ric|^2 + b_r2 R^2) g
//       - a_contr R_ikjl R^kl + a_rric R Ric
struct Coefficients {
  double lap, hess, dr, ric2, r2, contr, rric;
};

Coefficients coefficients(const FunctionalSpec& spec) {
  if (const auto* ft = std::get_if<FiniteT>(&spec)) {
    const double t = ft->t;
    return {1.0, 1.0 + 2.0 * t, -(1.0 + 4.0 * t) / 2.0, 0.5, 0.5 * t, 2.0, -2.0 * t};
  }
  return {0.0, 2.0, -2.0, 0.0, 0.5, 0.0, -2.0};
}

}  // namespace

GradientReport assemble_gradient(const GradientTerms& terms, const MetricField& g, const FunctionalSpec& spec) {
  const auto& c = terms.core;
  const Grid& grid = g.grid();
  const int n = grid.dimension();
  const Coefficients k = coefficients(spec);
  TensorField2 G(grid);
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    const double R = c.scalar[p];
    const double trace_part = k.dr * terms.scalar_hessian.laplacian[p] + k.ric2 * c.ricci_norm2[p] + k.r2 * R * R;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        G.at(p, i, j) = -k.lap * terms.ricci_laplacian.at(p, i, j) + k.hess * terms.scalar_hessian.hessian.at(p, i, j) +
                        trace_part * g.at(p, i, j) - k.contr * c.riem_ric.at(p, i, j) + k.rric * R * c.ricci.at(p, i, j);
  }
  return finish_report(std::move(G), c, functional_value(c, spec));
}

GradientReport gradient(const MetricField& g, const FunctionalSpec& spec, Stencil stencil) {
  return assemble_gradient(gradient_terms(g, stencil), g, spec);
}

GradientReport grad_f2t(const MetricField& g, double t, Stencil stencil) { return gradient(g, FiniteT{t}, stencil); }

GradientReport grad_s2(const MetricField& g, Stencil stencil) { return gradient(g, SigmaOnly{}, stencil); }

GradientReport grad_r2(const MetricField& g, Stencil stencil) {
  const auto terms = gradient_terms(g, stencil);
  const auto& c = terms.core;
  const int n = g.dimension();
  TensorField2 G(g.grid());
  for (std::size_t p = 0; p < g.grid().node_count(); ++p) {
    const double tr = -0.5 * terms.scalar_hessian.laplacian[p] + 0.5 * c.ricci_norm2[p];
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        G.at(p, i, j) = -terms.ricci_laplacian.at(p, i, j) - 2.0 * c.riem_ric.at(p, i, j) +
                        terms.scalar_hessian.hessian.at(p, i, j) + tr * g.at(p, i, j);
  }
  return finish_report(std::move(G), c, functional_value(c, FiniteT{0.0}));
}

GradientReport dim3_gradient(const GradientTerms& terms, const MetricField& g, double t) {
  if (g.dimension() != 3) throw DimensionError("three-dimensional assembly needs n = 3");
  const auto& c = terms.core;
  TensorField2 G(g.grid());
  for (std::size_t p = 0; p < g.grid().node_count(); ++p) {
    const double R = c.scalar[p];
    const double tr = -(1.0 + 4.0 * t) / 2.0 * terms.scalar_hessian.laplacian[p] - 1.5 * c.ricci_norm2[p] +
                      (2.0 + t) / 2.0 * R * R;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        double ric_sq = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) ric_sq += c.ricci.at(p, i, k) * c.inverse.at(p, k, l) * c.ricci.at(p, l, j);
        G.at(p, i, j) = -terms.ricci_laplacian.at(p, i, j) + (1.0 + 2.0 * t) * terms.scalar_hessian.hessian.at(p, i, j) +
                        tr * g.at(p, i, j) - (3.0 + 2.0 * t) * R * c.ricci.at(p, i, j) + 4.0 * ric_sq;
      }
  }
  return finish_report(std::move(G), c, functional_value(c, FiniteT{t}));
}

GradientReport dim3_gradient(const MetricField& g, double t, Stencil stencil) {
  if (g.dimension() != 3) throw DimensionError("three-dimensional assembly needs n = 3");
  return dim3_gradient(gradient_terms(g, stencil), g, t);
}

ScalarField trace_identity_residual(const GradientTerms& terms, const MetricField& g, const FunctionalSpec& spec) {
  const auto report = assemble_gradient(terms, g, spec);
  const auto& c = terms.core;
  const double n = g.dimension();
  ScalarField out(g.grid());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double R = c.scalar[p];
    const double lap = terms.scalar_hessian.laplacian[p];
    double expected = 0.0;
    if (const auto* ft = std::get_if<FiniteT>(&spec))
      expected = -(n + 4.0 * (n - 1.0) * ft->t) / 2.0 * lap + (n - 4.0) / 2.0 * (c.ricci_norm2[p] + ft->t * R * R);
    else
      expected = -2.0 * (n - 1.0) * lap + (n - 4.0) / 2.0 * R * R;
    out[p] = report.trace[p] - expected;
  }
  return out;
}

ScalarField trace_identity_residual(const MetricField& g, const FunctionalSpec& spec, Stencil stencil) {
  return trace_identity_residual(gradient_terms(g, stencil), g, spec);
}

double l2_pairing(const TensorField2& G, const TensorField2& h, const CurvatureCore& core) {
  const auto pr = tensor_pairing(G, h, core.inverse);
  return integrate_with_density(pr.values(), core.density, pr.grid().cell_volume());
}

std::vector<double> default_epsilon_ladder() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

namespace {

MetricField displaced(const MetricField& g, const TensorField2& h, double eps) {
  TensorField2 T = g.components();
  auto dst = T.raw();
  const auto src = h.raw();
  for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += eps * src[q];
  return MetricField(std::move(T));
}

double relative(double fd, double exact) {
  const double diff = std::abs(fd - exact);
  return std::abs(fd) > 1e-300 ? diff / std::abs(fd) : diff;
}

}  // namespace

std::vector<GateauxReport> gateaux_fd_check(const MetricField& g, const std::vector<FunctionalSpec>& specs,
                                            const TensorField2& h, const std::vector<double>& epsilons,
                                            Stencil stencil) {
  if (!(h.grid() == g.grid())) throw ConfigurationError("perturbation and metric grids differ");
  if (epsilons.empty()) throw ConfigurationError("empty epsilon ladder");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]) || !(epsilons[i] > 0.0))
      throw ConfigurationError("epsilon ladder must be positive and decreasing");
  h.require_finite("perturbation");

  const auto terms = gradient_terms(g, stencil);
  std::vector<GateauxReport> out;
  for (const auto& spec : specs) {
    GateauxReport r;
    r.spec = spec;
    r.pairing = l2_pairing(assemble_gradient(terms, g, spec).gradient, h, terms.core);
    out.push_back(std::move(r));
  }
  for (double eps : epsilons) {
    const auto plus = curvature_core(displaced(g, h, eps), stencil);
    const auto minus = curvature_core(displaced(g, h, -eps), stencil);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const double fp = functional_value(plus, specs[s]);
      const double fm = functional_value(minus, specs[s]);
      const double fd = (fp - fm) / (2.0 * eps);
      const bool cancel = std::abs(fp - fm) <= 1e-10 * std::max(std::abs(fp), std::abs(fm));
      out[s].rows.push_back({eps, fd, relative(fd, out[s].pairing), cancel});
    }
  }
  for (auto& r : out) {
    r.best_relative_error = r.rows[0].relative_error;
    r.best_epsilon = r.rows[0].epsilon;
    for (const auto& row : r.rows)
      if (row.relative_error < r.best_relative_error) {
        r.best_relative_error = row.relative_error;
        r.best_epsilon = row.epsilon;
      }
    if (r.rows.size() >= 2 && r.rows[0].relative_error > 0.0 && r.rows[1].relative_error > 0.0)
      r.observed_order = std::log(r.rows[0].relative_error / r.rows[1].relative_error) /
                         std::log(r.rows[0].epsilon / r.rows[1].epsilon);
    r.richardson_relative_error = r.rows[0].relative_error;
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) {
      const double q = r.rows[i].epsilon / r.rows[i + 1].epsilon;
      const double ext = (q * q * r.rows[i + 1].fd_derivative - r.rows[i].fd_derivative) / (q * q - 1.0);
      r.richardson_relative_error = std::min(r.richardson_relative_error, relative(ext, r.pairing));
    }
  }
  return out;
}

// ------------------------------------------------------------ warped products

double functional_value(const WarpedProductMetric& w, const FunctionalSpec& spec) {
  const auto c = warped_curvature(w);
  const double n = w.dimension();
  std::vector<double> v(w.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double R = c.scalar[i];
    const double A = c.ricci_radial[i], B = c.ricci_tangential[i];
    if (const auto* ft = std::get_if<FiniteT>(&spec))
      v[i] = A * A + (n - 1) * B * B + ft->t * R * R;
    else
      v[i] = R * R;
  }
  return w.integrate(v);
}

WarpedGradient warped_gradient(const WarpedProductMetric& w, const FunctionalSpec& spec) {
  const auto c = warped_curvature(w);
  const double n = w.dimension();
  const std::size_t N = w.size();
  const Coefficients k = coefficients(spec);
  WarpedGradient out{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N), 0.0, 0.0};
  for (std::size_t i = 0; i < N; ++i) {
    const double A = c.ricci_radial[i], B = c.ricci_tangential[i], R = c.scalar[i];
    const double psi = c.mean_curvature[i];
    const double lapA = c.ddA[i] + (n - 1) * psi * c.dA[i];
    const double lapB = c.ddB[i] + (n - 1) * psi * c.dB[i];
    const double lapR = c.ddR[i] + (n - 1) * psi * c.dR[i];
    const double lapRic_rr = lapA - 2 * (n - 1) * psi * psi * (A - B);
    const double lapRic_tan = lapB + 2 * psi * psi * (A - B);
    const double contr_rr = (n - 1) * c.radial_sectional[i] * B;
    const double contr_tan = c.radial_sectional[i] * A + (n - 2) * c.tangential_sectional[i] * B;
    const double ric2 = A * A + (n - 1) * B * B;
    const double tr = k.dr * lapR + k.ric2 * ric2 + k.r2 * R * R;
    out.radial[i] = -k.lap * lapRic_rr + k.hess * c.ddR[i] + tr - k.contr * contr_rr + k.rric * R * A;
    out.tangential[i] = -k.lap * lapRic_tan + k.hess * psi * c.dR[i] + tr - k.contr * contr_tan + k.rric * R * B;
    out.trace[i] = out.radial[i] + (n - 1) * out.tangential[i];
    out.sup_norm = std::max(out.sup_norm, std::sqrt(out.radial[i] * out.radial[i] +
                                                    (n - 1) * out.tangential[i] * out.tangential[i]));
  }
  out.value = functional_value(w, spec);
  return out;
}

std::vector<double> profile_gradient_density(const WarpedProductMetric& w, const WarpedGradient& G) {
  const double n = w.dimension();
  std::vector<double> d(w.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = 2.0 * (n - 1) * G.tangential[i] * std::pow(w.phi()[i], n - 2) * w.options().fiber_volume;
  return d;
}

// ------------------------------------------------- homogeneous Einstein spaces

HomogeneousEinstein HomogeneousEinstein::unit_sphere(int n) {
  const double vol = 2.0 * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
  return {n, static_cast<double>(n * (n - 1)), vol};
}

// Infinite volume; values are reported per unit volume.
HomogeneousEinstein HomogeneousEinstein::hyperbolic(int n) { return {n, -static_cast<double>(n * (n - 1)), 1.0}; }

HomogeneousEinstein HomogeneousEinstein::flat(int n, double volume) { return {n, 0.0, volume}; }

HomogeneousEinstein HomogeneousEinstein::scaled(double c) const {
  return {n, scalar / (c * c), volume * std::pow(c, n)};
}

double functional_value(const HomogeneousEinstein& m, const FunctionalSpec& spec) {
  const double R = m.scalar;
  const double ric2 = R * R / m.n;
  if (const auto* ft = std::get_if<FiniteT>(&spec)) return (ric2 + ft->t * R * R) * m.volume;
  return R * R * m.volume;
}

double gradient_coefficient(const HomogeneousEinstein& m, const FunctionalSpec& spec) {
  // Einstein algebra: Lap Ric = Hess R = Delta R = 0, Ric = (R/n) g and
  // R_ikjl R^kl = (R/n) Ric, so every term is a multiple of g.
  const double n = m.n;
  const double R = m.scalar;
  const double ric = R / n;
  const double ric2 = R * R / n;
  const double contr = ric * ric;
  const Coefficients k = coefficients(spec);
  return k.ric2 * ric2 + k.r2 * R * R - k.contr * contr + k.rric * R * ric;
}

double bakry_emery_residual_coefficient(const HomogeneousEinstein& m) {
  if (!(m.scalar < 0.0)) throw PreconditionError("potential -log(-R) needs R < 0");
  // f is constant, so Ric^1_f = Ric = (R/n) g and e^{-f} = -R.
  return m.scalar / m.n + 3.0 / (4.0 * (m.n - 1)) * (-m.scalar);
}

}  // namespace curvlab
