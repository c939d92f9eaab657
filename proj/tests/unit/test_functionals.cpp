#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/functionals.hpp"
#include "curvlab/metric_ops.hpp"
#include "curvlab/samples.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {

const std::vector<FunctionalSpec> kSpecs = {FiniteT{-1.0 / 3.0}, FiniteT{0.0}, FiniteT{1.0}, SigmaOnly{}};

double max_diff(const TensorField2& a, const TensorField2& b) {
  double m = 0.0;
  for (std::size_t q = 0; q < a.raw().size(); ++q) m = std::max(m, std::abs(a.raw()[q] - b.raw()[q]));
  return m;
}

MetricField scaled(const MetricField& g, double s) {
  TensorField2 T = g.components();
  for (double& v : T.raw()) v *= s;
  return MetricField(std::move(T));
}

// Roll every field one node forward along axis 0.
TensorField2 shifted(const TensorField2& T) {
  const Grid& grid = T.grid();
  const int n = grid.dimension();
  TensorField2 out(grid);
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    for (int a = 0; a < n; ++a) idx[static_cast<std::size_t>(a)] = grid.axis_index(p, a);
    idx[0] = (idx[0] + 1) % grid.points();
    const std::size_t q = grid.index(idx);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.at(q, i, j) = T.at(p, i, j);
  }
  return out;
}

}  // namespace

TEST_CASE("flat metric is critical for every functional") {
  const auto g = MetricField::identity(Grid::cube(3, 8));
  for (const auto& spec : kSpecs) {
    const auto r = gradient(g, spec);
    CHECK(r.sup_norm == 0.0);
    CHECK(r.value == 0.0);
    CHECK(trace_identity_residual(g, spec).max_abs() == 0.0);
  }
  CHECK(dim3_gradient(g, 0.0).sup_norm == 0.0);
}

TEST_CASE("spec parsing") {
  CHECK(std::holds_alternative<SigmaOnly>(spec_from_string("sigma")));
  CHECK(std::get<FiniteT>(spec_from_string("-1/3")).t == doctest::Approx(-1.0 / 3.0));
  CHECK(std::get<FiniteT>(spec_from_string("0.25")).t == 0.25);
  CHECK_THROWS_AS(spec_from_string("banana"), ConfigurationError);
}

TEST_CASE("homogeneous Einstein closed forms") {
  const auto s3 = HomogeneousEinstein::unit_sphere(3);
  CHECK(s3.scalar == 6.0);
  CHECK(s3.volume == doctest::Approx(2 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
  CHECK(functional_value(s3, FiniteT{0.0}) == doctest::Approx(24 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
  CHECK(gradient_coefficient(s3, FiniteT{0.0}) == -2.0);
  CHECK(std::abs(gradient_coefficient(s3, FiniteT{-1.0 / 3.0})) < 1e-14);
  // R^2 (-1/18 - t/6) on the unit 3-sphere
  for (double t : {-2.0, -0.5, 0.25, 3.0})
    CHECK(gradient_coefficient(s3, FiniteT{t}) == doctest::Approx(36 * (-1.0 / 18 - t / 6)).epsilon(1e-13));

  CHECK(gradient_coefficient(HomogeneousEinstein::hyperbolic(4), SigmaOnly{}) == 0.0);
  CHECK(gradient_coefficient(HomogeneousEinstein::hyperbolic(5), SigmaOnly{}) == 40.0);
  CHECK(std::abs(bakry_emery_residual_coefficient(HomogeneousEinstein::hyperbolic(4))) < 1e-14);
  CHECK_THROWS_AS(bakry_emery_residual_coefficient(s3), PreconditionError);
  for (const auto& spec : kSpecs) CHECK(gradient_coefficient(HomogeneousEinstein::flat(3), spec) == 0.0);

  // trace identity on S^3 at t = 0: trace(-2g) = -6 = (n-4)/2 |Ric|^2
  CHECK(3 * gradient_coefficient(s3, FiniteT{0.0}) == -0.5 * 12.0);
}

TEST_CASE("homogeneous scaling law") {
  for (int n : {3, 4, 5}) {
    const auto m = HomogeneousEinstein::unit_sphere(n);
    for (const auto& spec : kSpecs)
      CHECK(functional_value(m.scaled(2.0), spec) ==
            doctest::Approx(std::pow(2.0, n - 4) * functional_value(m, spec)).epsilon(1e-13));
  }
}

TEST_CASE("grid scaling law") {
  const auto g = random_smooth_metric(Grid::cube(3, 16), 11, 0.12);
  const auto g4 = scaled(g, 4.0);
  for (const auto& spec : kSpecs)
    CHECK(functional_value(g4, spec, Stencil::Spectral) ==
          doctest::Approx(0.5 * functional_value(g, spec, Stencil::Spectral)).epsilon(1e-11));
}

TEST_CASE("r2 gradient matches t = 0 and linearity in t") {
  const auto g = random_smooth_metric(Grid::cube(3, 12), 3, 0.12);
  const auto r2 = grad_r2(g, Stencil::Spectral);
  const auto f0 = grad_f2t(g, 0.0, Stencil::Spectral);
  const auto f1 = grad_f2t(g, 1.0, Stencil::Spectral);
  const double scale = r2.sup_norm;
  CHECK(max_diff(r2.gradient, f0.gradient) < 1e-13 * std::max(1.0, scale));
  for (double t : {-0.375, -0.25, 2.5}) {
    const auto ft = grad_f2t(g, t, Stencil::Spectral);
    double m = 0.0;
    for (std::size_t q = 0; q < ft.gradient.raw().size(); ++q) {
      const double lin = r2.gradient.raw()[q] + t * (f1.gradient.raw()[q] - r2.gradient.raw()[q]);
      m = std::max(m, std::abs(ft.gradient.raw()[q] - lin));
    }
    CHECK(m < 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("three-dimensional assembly agrees with the general one") {
  const auto g = random_smooth_metric(Grid::cube(3, 12), 5, 0.12);
  const auto terms = gradient_terms(g, Stencil::Spectral);
  for (double t : {-1.0 / 3.0, 0.0, 1.0}) {
    const auto a = assemble_gradient(terms, g, FiniteT{t});
    const auto b = dim3_gradient(terms, g, t);
    CHECK(max_diff(a.gradient, b.gradient) < 1e-10);
  }
  CHECK_THROWS_AS(dim3_gradient(MetricField::identity(Grid::cube(4, 8)), 0.0), DimensionError);
}

TEST_CASE("trace identity holds for arbitrary metrics") {
  const auto g = random_smooth_metric(Grid::cube(3, 24), 7, 0.12);
  const auto terms = gradient_terms(g, Stencil::Spectral);
  for (const auto& spec : kSpecs) {
    const auto res = trace_identity_residual(terms, g, spec);
    CHECK(res.max_abs() < 1e-6);
    const auto r = assemble_gradient(terms, g, spec);
    const auto tr = metric_trace(r.gradient, terms.core.inverse);
    double m = 0.0;
    for (std::size_t p = 0; p < tr.size(); ++p) m = std::max(m, std::abs(tr[p] - r.trace[p]));
    CHECK(m == 0.0);
  }
  const auto g4 = random_smooth_metric(Grid::cube(4, 12), 8, 0.1);
  CHECK(trace_identity_residual(g4, SigmaOnly{}, Stencil::Spectral).max_abs() < 1e-6);
}

TEST_CASE("Gateaux derivative matches the L2 pairing") {
  SUBCASE("3D, all specs") {
    const auto g = random_smooth_metric(Grid::cube(3, 16), 21, 0.12);
    const auto h = random_smooth_tensor(g.grid(), 22, 1.0);
    for (const auto& r : gateaux_fd_check(g, kSpecs, h, default_epsilon_ladder(), Stencil::Spectral)) {
      CHECK(r.best_relative_error < 1e-6);
      CHECK(r.observed_order == doctest::Approx(2.0).epsilon(0.05));
    }
  }
  SUBCASE("4D, sigma only") {
    const auto g = random_smooth_metric(Grid::cube(4, 10), 31, 0.1);
    const auto h = random_smooth_tensor(g.grid(), 32, 1.0);
    const auto r = gateaux_fd_check(g, {SigmaOnly{}}, h, default_epsilon_ladder(), Stencil::Spectral);
    CHECK(r[0].best_relative_error < 1e-5);
  }
  SUBCASE("flat metric: both sides vanish") {
    const auto g = MetricField::identity(Grid::cube(3, 8));
    const auto h = random_smooth_tensor(g.grid(), 1, 1.0);
    for (const auto& r : gateaux_fd_check(g, kSpecs, h, {1e-2, 1e-3}, Stencil::Spectral)) {
      CHECK(r.pairing == 0.0);
      // F(g + eps h) is O(eps^2), so the central difference is O(eps^2) as well
      CHECK(r.rows[1].fd_derivative / r.rows[0].fd_derivative == doctest::Approx(1e-2).epsilon(0.05));
    }
  }
  SUBCASE("bad ladder") {
    const auto g = MetricField::identity(Grid::cube(3, 8));
    const auto h = random_smooth_tensor(g.grid(), 1, 1.0);
    CHECK_THROWS_AS(gateaux_fd_check(g, kSpecs, h, {1e-3, 1e-2}), ConfigurationError);
  }
}

TEST_CASE("gradient commutes with periodic grid shifts") {
  const auto g = random_smooth_metric(Grid::cube(3, 10), 41, 0.12);
  const auto gs = MetricField(shifted(g.components()));
  for (const auto& spec : {FunctionalSpec{FiniteT{0.0}}, FunctionalSpec{SigmaOnly{}}}) {
    const auto a = shifted(gradient(g, spec).gradient);
    const auto b = gradient(gs, spec).gradient;
    CHECK(max_diff(a, b) == 0.0);
  }
}

TEST_CASE("warped products: constant curvature oracles") {
  WarpedProductMetric::Options sphere_fiber;
  sphere_fiber.fiber_curvature = 1.0;
  for (int n : {2, 3, 4, 5}) {
    const auto s = WarpedProductMetric::from_jet(
        n, 0.3, 2.8, 40,
        [](double r) { return std::array<double, 5>{std::sin(r), std::cos(r), -std::sin(r), -std::cos(r), std::sin(r)}; },
        sphere_fiber);
    const auto h = WarpedProductMetric::from_jet(
        n, 0.3, 2.8, 40,
        [](double r) {
          return std::array<double, 5>{std::sinh(r), std::cosh(r), std::sinh(r), std::cosh(r), std::sinh(r)};
        },
        sphere_fiber);
    const auto cs = warped_curvature(s);
    const auto ch = warped_curvature(h);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(cs.scalar[i] == doctest::Approx(n * (n - 1.0)).epsilon(1e-12));
      CHECK(ch.scalar[i] == doctest::Approx(-n * (n - 1.0)).epsilon(1e-12));
    }
  }
  // exponential profile over a flat fiber is also hyperbolic
  const auto e = WarpedProductMetric::from_jet(
      4, -1.0, 1.0, 20, [](double r) { const double v = std::exp(r); return std::array<double, 5>{v, v, v, v, v}; }, {});
  for (double R : warped_curvature(e).scalar) CHECK(R == doctest::Approx(-12.0).epsilon(1e-13));

  // sampled sin profile: finite-difference jets
  std::vector<double> phi(200);
  const double lo = 0.5, hi = 2.5;
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::sin(lo + (hi - lo) * i / 199.0);
  const WarpedProductMetric sampled(3, lo, hi, phi, sphere_fiber);
  for (double R : warped_curvature(sampled).scalar) CHECK(R == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("warped sphere gradient matches Einstein algebra") {
  WarpedProductMetric::Options opt;
  opt.fiber_curvature = 1.0;
  const auto s = WarpedProductMetric::from_jet(
      3, 0.4, 2.7, 30,
      [](double r) { return std::array<double, 5>{std::sin(r), std::cos(r), -std::sin(r), -std::cos(r), std::sin(r)}; },
      opt);
  for (double t : {-1.0 / 3.0, 0.0, 0.7}) {
    const auto G = warped_gradient(s, FiniteT{t});
    const double ref = gradient_coefficient(HomogeneousEinstein::unit_sphere(3), FiniteT{t});
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(G.radial[i] == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
      CHECK(G.tangential[i] == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("profile quadrature") {
  std::vector<double> f(17);
  const double h = 0.125;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = h * i;
    f[i] = 1 - 2 * x + 3 * x * x - x * x * x;
  }
  // integral over [0, 2] of 1 - 2x + 3x^2 - x^3
  CHECK(profile_integral(f, h, false) == doctest::Approx(2.0 - 4.0 + 8.0 - 4.0).epsilon(1e-14));
  std::vector<double> p(32);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(std::cos(2 * std::numbers::pi * i / 32.0), 2);
  CHECK(profile_integral(p, 1.0 / 32, true) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("warped profile variation matches the gradient density") {
  const double L = 2 * std::numbers::pi;
  const int N = 48;
  std::vector<double> phi(N), dphi(N);
  for (int i = 0; i < N; ++i) {
    const double r = L * i / N;
    phi[static_cast<std::size_t>(i)] = 1.0 + 0.1 * std::sin(r) + 0.05 * std::cos(2 * r);
    dphi[static_cast<std::size_t>(i)] = 0.3 * std::cos(r) - 0.2 * std::sin(3 * r) + 0.1;
  }
  WarpedProductMetric::Options opt;
  opt.periodic = true;
  opt.fiber_volume = 2.5;
  for (int n : {3, 4}) {
    const WarpedProductMetric w(n, 0.0, L, phi, opt);
    for (const auto& spec : kSpecs) {
      const auto G = warped_gradient(w, spec);
      const auto dens = profile_gradient_density(w, G);
      std::vector<double> prod(phi.size());
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = dens[i] * dphi[i];
      const double pairing = profile_integral(prod, w.spacing(), true);
      const double eps = 1e-4;
      std::vector<double> pp(phi), pm(phi);
      for (std::size_t i = 0; i < phi.size(); ++i) {
        pp[i] += eps * dphi[i];
        pm[i] -= eps * dphi[i];
      }
      const double fd = (functional_value(w.with_profile(pp), spec) - functional_value(w.with_profile(pm), spec)) / (2 * eps);
      CHECK(fd == doctest::Approx(pairing).epsilon(1e-7));
    }
  }
}

TEST_CASE("warped gradient matches the grid assembly") {
  // dr^2 + phi(x0)^2 (dy^2 + dz^2) on a 3-torus is a warped product over a flat fiber.
  const int N = 40;
  const Grid grid = Grid::cube(3, N);
  auto prof = [](double r) { return 1.0 + 0.1 * std::sin(r) + 0.04 * std::cos(2 * r); };
  const auto g = MetricField::from_function(grid, [&](std::span<const double> x, std::span<double> m) {
    const double p = prof(x[0]);
    for (int q = 0; q < 9; ++q) m[static_cast<std::size_t>(q)] = 0.0;
    m[0] = 1.0;
    m[4] = m[8] = p * p;
  });
  std::vector<double> phi(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) phi[static_cast<std::size_t>(i)] = prof(grid.length(0) * i / N);
  WarpedProductMetric::Options opt;
  opt.periodic = true;
  const WarpedProductMetric w(3, 0.0, grid.length(0), phi, opt);
  for (const auto& spec : kSpecs) {
    const auto Gw = warped_gradient(w, spec);
    const auto Gg = gradient(g, spec, Stencil::Spectral);
    double err = 0.0;
    for (std::size_t p = 0; p < grid.node_count(); ++p) {
      const auto i = static_cast<std::size_t>(grid.axis_index(p, 0));
      const double p2 = phi[i] * phi[i];
      err = std::max({err, std::abs(Gg.gradient.at(p, 0, 0) - Gw.radial[i]),
                      std::abs(Gg.gradient.at(p, 1, 1) / p2 - Gw.tangential[i]),
                      std::abs(Gg.gradient.at(p, 2, 2) / p2 - Gw.tangential[i]), std::abs(Gg.gradient.at(p, 0, 1)),
                      std::abs(Gg.gradient.at(p, 1, 2))});
    }
    CHECK(err < 1e-9);
  }
}
