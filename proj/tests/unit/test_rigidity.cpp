#include <cmath>
#include <cstdint>
#include <numbers>

#include "curvlab/conformal_ode.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/functionals.hpp"
#include "curvlab/rigidity.hpp"
#include "curvlab/samples.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {

// Separatrix surface through f(0) = -1, f'(0) < 0: f = -24/(r - rb)^2 with
// rb = 2 sqrt 6, dV = |f'| dr. With x = rb - r every integrand is a power of x.
const double kBlowUp = 2.0 * std::sqrt(6.0);

double power_integral(double p, double x1, double x2) {
  return (std::pow(x2, p + 1.0) - std::pow(x1, p + 1.0)) / (p + 1.0);
}

// int over |r - c| < s of |f'|^2 |f|^alpha dV and of |f|^e dV.
double exact_gradient_term(double c, double s, double alpha) {
  const double x1 = kBlowUp - c - s, x2 = kBlowUp - c + s;
  return std::pow(48.0, 3) * std::pow(24.0, alpha) * power_integral(-9.0 - 2.0 * alpha, x1, x2);
}
double exact_power_term(double c, double s, double e) {
  const double x1 = kBlowUp - c - s, x2 = kBlowUp - c + s;
  return 48.0 * std::pow(24.0, e) * power_integral(-3.0 - 2.0 * e, x1, x2);
}

OdeSolution canonical_separatrix() { return integrate_ode(-1.0, -std::sqrt(1.0 / 6.0)); }

}  // namespace

TEST_CASE("constants for n = 5") {
  const auto k = compute_constants(5);
  CHECK(k.a_exact == "64");
  CHECK(k.b_exact == "128");
  CHECK(k.c_exact == "44");
  CHECK(k.delta2_exact == "5120");
  CHECK(k.delta2_agree);
  CHECK(k.C == doctest::Approx((128.0 - std::sqrt(5120.0)) / 128.0).epsilon(1e-15));
  CHECK(std::abs(k.q_star - (2.0 + 8.0 / (128.0 - std::sqrt(5120.0)))) < 1e-12);
  CHECK(std::abs(k.q_star - k.q_star_closed) < 1e-12);
  CHECK(k.C == k.A_lo);
}

TEST_CASE("constants sweep n = 5..64") {
  for (int n = 5; n <= 64; ++n) {
    CAPTURE(n);
    const auto k = compute_constants(n);
    const std::int64_t N = n;
    const std::int64_t a = 4 * (N - 1) * (N - 3) * (N - 3);
    const std::int64_t b = 4 * (N * N * N + N * N - 29 * N + 27);
    const std::int64_t c = N * N * N - 11 * N * N + 55 * N - 81;
    CHECK(k.a_exact == std::to_string(a));
    CHECK(k.b_exact == std::to_string(b));
    CHECK(k.c_exact == std::to_string(c));
    CHECK(k.delta2_exact == std::to_string(b * b - 4 * a * c));
    CHECK(k.delta2_agree);
    CHECK(a > 0);
    CHECK(b > 0);
    CHECK(c > 0);
    CHECK(k.delta2 > 0.0);
    CHECK(k.A_lo > 0.0);
    CHECK(k.A_lo < k.A_hi);
    CHECK(k.q_star > 2.0);
    CHECK(std::abs(k.q_star - k.q_star_closed) < 1e-12);
  }
  CHECK_THROWS_AS(compute_constants(4), DomainError);
  CHECK_THROWS_AS(compute_constants(2), DomainError);
}

TEST_CASE("quadratic negativity") {
  for (int n = 5; n <= 12; ++n) {
    const auto k = compute_constants(n);
    for (double A : interior_points(k, 5)) {
      CAPTURE(n);
      CAPTURE(A);
      const auto rep = quadratic_negativity(n, A);
      REQUIRE(rep.lambda.has_value());
      CHECK(*rep.lambda > 0.0);
      CHECK(rep.q.delta1 < 0.0);
      CHECK(rep.q.delta1 == doctest::Approx(rep.delta1_factored).epsilon(1e-12));
      CHECK(rep.vertex_gap < 1e-12);
      CHECK(rep.sampled_below);
      // value at the vertex t = beta / (2 alpha)
      const auto& q = rep.q;
      const double t = q.beta / (2.0 * q.alpha);
      CHECK(std::abs(-q.alpha * t * t + q.beta * t - q.gamma + *rep.lambda) < 1e-12);
      CHECK(q.gamma == doctest::Approx(n / (n - 1.0)));
    }
  }
  SUBCASE("interval ends and outside") {
    const auto k = compute_constants(5);
    const auto lo = quadratic_negativity(5, k.A_lo);
    CHECK_FALSE(lo.lambda.has_value());
    CHECK(std::abs(lo.q.delta1) < 1e-14);
    CHECK_FALSE(quadratic_negativity(5, k.A_hi).lambda.has_value());
    const auto out = quadratic_negativity(5, 2.0 * k.A_hi);
    CHECK_FALSE(out.lambda.has_value());
    CHECK(out.q.delta1 > 0.0);
  }
  CHECK_THROWS_AS(quadratic_negativity(4, 1.0), DomainError);
}

TEST_CASE("Hessian inequality closed forms") {
  for (int n = 2; n <= 6; ++n) {
    const auto N = static_cast<std::size_t>(n);
    std::vector<double> x(N), H(N * N, 0.0), X(N);
    for (std::size_t i = 0; i < N; ++i) {
      x[i] = 0.3 + 0.7 * static_cast<double>(i);
      H[i * N + i] = 1.0;
      X[i] = 2.0 * x[i];
    }
    const auto s = hessian_inequality_check(x, H, X);
    CHECK(s.lhs == doctest::Approx(n));
    CHECK(s.rhs == doctest::Approx(n * (n - 2.0) / (n - 1.0)));
    CHECK(s.residual > 0.0);

    const std::vector<double> zero(N * N, 0.0), zv(N, 0.0);
    const auto lin = hessian_inequality_check(x, zero, zv);
    CHECK(lin.lhs == 0.0);
    CHECK(lin.rhs == 0.0);
    CHECK_THROWS_AS(hessian_inequality_check(zv, H, X), PreconditionError);
  }
}

TEST_CASE("Hessian inequality on sampled fields") {
  std::size_t total = 0;
  struct Case {
    int n, points;
    std::uint64_t seed;
  };
  for (const Case c : {Case{3, 24, 1}, Case{3, 24, 2}, Case{4, 12, 3}, Case{4, 12, 4}, Case{5, 8, 5}}) {
    CAPTURE(c.n);
    const Grid grid = Grid::cube(c.n, c.points);
    const auto g = random_smooth_metric(grid, 100 + c.seed, 0.1);
    const auto w = random_smooth_scalar(grid, 200 + c.seed, 1.0);
    const auto rep = hessian_inequality_field(g, w, Stencil::Spectral, 1e-6);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_relative > -1e-6);
    total += rep.samples;
  }
  CHECK(total >= 100000);
}

TEST_CASE("integral estimate against the exact separatrix") {
  const auto sol = canonical_separatrix();
  for (auto [s1, s2] : {std::pair{1.0, 2.0}, std::pair{0.5, 1.5}}) {
    const auto surf = reconstruct_surface(sol, -s2, s2, 801);
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
      CAPTURE(s1);
      CAPTURE(alpha);
      const auto rep = integral_estimate_check(surf.surface, 0.0, alpha, CutoffProfile{s1, s2, 2.0});
      CHECK(rep.n == 2);
      CHECK(rep.criticality_residual < 1e-6);
      const double lhs = exact_gradient_term(0.0, s1, alpha);
      const double rhs = -1.0 / (1.0 + alpha) * exact_power_term(0.0, s2, alpha + 3.0) +
                         4.0 / ((1.0 + alpha) * (1.0 + alpha) * (s2 - s1) * (s2 - s1)) *
                             exact_power_term(0.0, s2, alpha + 2.0);
      CHECK(rep.stated_lhs == doctest::Approx(lhs).epsilon(1e-8));
      CHECK(rep.stated_rhs == doctest::Approx(rhs).epsilon(1e-8));
      // the cutoff-weighted bound and the identity behind it hold in every dimension
      CHECK(rep.cutoff_margin > 0.0);
      CHECK(rep.identity_residual < 1e-10);
    }
  }
}

TEST_CASE("closed-ball integral estimate in two dimensions") {
  // With n = 2 the |R|^{alpha+3} coefficient is negative, so bounding the
  // cutoff by the indicator of the larger ball goes the wrong way. The
  // closed-ball form holds where |R| s2^2 is small and fails near the blow-up.
  const auto sol = integrate_ode(-6.0, -6.0);  // blows up at r = 2
  const auto far = reconstruct_surface(sol, -22.0, -18.0, 401);
  for (double alpha : {0.0, 1.0, 2.0}) {
    const auto rep = integral_estimate_check(far.surface, -20.0, alpha, CutoffProfile{1.0, 2.0, 2.0});
    CHECK(rep.stated_margin > 0.0);
    CHECK(rep.cutoff_margin > 0.0);
  }
  const auto near = reconstruct_surface(sol, -5.0, -1.0, 801);
  const auto a0 = integral_estimate_check(near.surface, -3.0, 0.0, CutoffProfile{1.0, 2.0, 2.0});
  const auto a2 = integral_estimate_check(near.surface, -3.0, 2.0, CutoffProfile{1.0, 2.0, 2.0});
  CHECK(a0.stated_margin > 0.0);
  CHECK(a2.stated_margin < 0.0);
  CHECK(a2.cutoff_margin > 0.0);
}

TEST_CASE("integral estimate preconditions") {
  SUBCASE("scalar-flat cylinder gives 0 <= 0") {
    const WarpedProductMetric cyl(2, -3.0, 3.0, std::vector<double>(121, 1.0), {});
    const auto rep = integral_estimate_check(cyl, 0.0, 1.0, CutoffProfile{1.0, 2.0, 2.0});
    CHECK(rep.stated_lhs == 0.0);
    CHECK(rep.stated_rhs == 0.0);
    CHECK(rep.cutoff_margin == 0.0);
  }
  SUBCASE("non-critical surface") {
    WarpedProductMetric::Options opt;
    opt.periodic = true;
    std::vector<double> phi;
    for (int i = 0; i < 128; ++i) phi.push_back(1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * i / 128.0));
    const WarpedProductMetric w(2, 0.0, 2.0 * std::numbers::pi, phi, opt);
    CHECK_THROWS_AS(integral_estimate_check(w, 3.0, 0.0, CutoffProfile{0.5, 1.0, 2.0}), PreconditionError);
  }
  SUBCASE("bad parameters") {
    const auto surf = reconstruct_surface(canonical_separatrix(), -2.0, 2.0);
    CHECK_THROWS_AS(integral_estimate_check(surf.surface, 0.0, -1.0, CutoffProfile{1.0, 2.0, 2.0}),
                    PreconditionError);
    CHECK_THROWS_AS(integral_estimate_check(surf.surface, 0.0, 0.0, CutoffProfile{2.0, 1.0, 2.0}),
                    PreconditionError);
    CHECK_THROWS_AS(integral_estimate_check(surf.surface, 0.5, 0.0, CutoffProfile{1.0, 2.0, 2.0}),
                    PreconditionError);
  }
}

TEST_CASE("cutoff profile") {
  const CutoffProfile c{1.0, 3.0, 2.0};
  CHECK(c.value(0.5) == 1.0);
  CHECK(c.value(1.0) == 1.0);
  CHECK(c.value(3.0) == 0.0);
  CHECK(c.value(2.0) == doctest::Approx(0.5));
  double steepest = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double d = 1.0 + 2.0 * i / 1000.0;
    const double v = c.value(d);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    steepest = std::max(steepest, std::abs(c.slope(d)));
    const double e = 1e-6;
    if (d > 1.0 + e && d < 3.0 - e) CHECK(c.slope(d) == doctest::Approx((c.value(d + e) - c.value(d - e)) / (2 * e)).epsilon(1e-6));
  }
  CHECK(steepest == doctest::Approx(1.5 / 2.0));
  CHECK(steepest <= c.c_cut / (c.s2 - c.s1));
}

TEST_CASE("separatrix gradient ratio") {
  SUBCASE("decreasing branch") {
    const auto surf = reconstruct_surface(integrate_ode(-6.0, -6.0), -6.0, 0.0);
    const auto rep = gradient_estimate_probe(surf.surface, 10, surf.surface.size() - 10);
    CHECK(std::abs(rep.sup_ratio_cube - 1.0 / 6.0) < 1e-8);
    CHECK(std::abs(rep.inf_ratio_cube - 1.0 / 6.0) < 1e-8);
  }
  SUBCASE("increasing branch") {
    const auto surf = reconstruct_surface(integrate_ode(-6.0, 6.0), 0.0, 6.0);
    const auto rep = gradient_estimate_probe(surf.surface, 10, surf.surface.size() - 10);
    CHECK(std::abs(rep.sup_ratio_cube - 1.0 / 6.0) < 1e-8);
    CHECK(std::abs(rep.inf_ratio_cube - 1.0 / 6.0) < 1e-8);
  }
  SUBCASE("constant curvature") {
    const auto hyp = WarpedProductMetric::from_jet(
        2, -1.0, 1.0, 101,
        [](double r) {
          return std::array<double, 5>{std::cosh(r), std::sinh(r), std::cosh(r), std::sinh(r), std::cosh(r)};
        },
        {});
    const auto rep = gradient_estimate_probe(hyp, 0, hyp.size());
    CHECK(rep.sup_ratio_square < 1e-24);
    CHECK(rep.sup_ratio_cube < 1e-24);
  }
  SUBCASE("nonnegative curvature rejected") {
    const WarpedProductMetric cyl(2, 0.0, 1.0, std::vector<double>(11, 1.0), {});
    CHECK_THROWS_AS(gradient_estimate_probe(cyl, 0, cyl.size()), PreconditionError);
  }
}

TEST_CASE("decay envelope") {
  SUBCASE("constant") {
    const std::vector<double> u(50, 1.0);
    const auto rep = decay_envelope_check(u, 0.1, 0, 0.0);
    CHECK(rep.holds);
    CHECK(rep.min_margin == 0.0);
  }
  SUBCASE("equality case") {
    std::vector<double> u;
    for (int i = 0; i < 200; ++i) u.push_back(std::pow(1.0 + 0.05 * i, -2.0));
    const auto rep = decay_envelope_check(u, 0.05, 0, 1.0);
    CHECK(rep.holds);
    CHECK(std::abs(rep.min_margin) < 1e-12);
    CHECK(rep.c_measured == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("separatrix profile") {
    const auto surf = reconstruct_surface(integrate_ode(-6.0, -6.0), -10.0, 0.0, 401);
    std::vector<double> u;
    for (const auto& s : surf.states) u.push_back(-s.f);
    const auto measured = decay_envelope_check(u, 10.0 / 400.0, 200);
    CHECK(measured.c_measured == doctest::Approx(1.0 / (2.0 * std::sqrt(6.0))).epsilon(1e-8));
    CHECK(measured.holds);
    CHECK(decay_envelope_check(u, 10.0 / 400.0, 200, 1.0 / std::sqrt(6.0)).holds);
    const auto bad = decay_envelope_check(u, 10.0 / 400.0, 200, 0.1);
    CHECK_FALSE(bad.hypothesis_holds);
    CHECK(bad.violating_sample.has_value());
    CHECK_FALSE(bad.holds);
  }
  CHECK_THROWS_AS(decay_envelope_check(std::vector<double>{1.0, 0.0, 1.0}, 0.1, 0), PreconditionError);
}

TEST_CASE("manufactured radial critical metric in dimension five") {
  for (double p : {0.3, 0.5, 1.0}) {
    CAPTURE(p);
    const auto mc = manufactured_critical(5, -1.0, p, 0.0, 3.0, 601);
    CHECK(mc.constraint_residual < 1e-12);
    const auto curv = warped_curvature(mc.metric);
    for (std::size_t i = 0; i < mc.scalar.size(); ++i) CHECK(curv.scalar[i] == doctest::Approx(mc.scalar[i]).epsilon(1e-10));

    std::vector<double> f;
    for (double R : mc.scalar) f.push_back(-std::log(-R));
    const std::size_t first = 20, last = mc.metric.size() - 20;
    const auto rep = bochner_inequality_check(mc.metric, f, true, first, last);
    CHECK(rep.asserted);
    CHECK(rep.criticality_residual < 1e-6);
    CHECK(rep.holds);
    CHECK(rep.min_relative > 0.0);

    // traced weighted equation Delta_f f = (n-4)/(4(n-1)) e^{-f}
    const auto fj = mc.metric.derivatives(f);
    const auto& jet = mc.metric.jet();
    for (std::size_t i = first; i < last; ++i) {
      const double lap = fj.d[2][i] + 4.0 * jet.d[1][i] / jet.d[0][i] * fj.d[1][i];
      CHECK(lap - fj.d[1][i] * fj.d[1][i] == doctest::Approx(std::exp(-f[i]) / 16.0).epsilon(1e-7));
    }
  }
}

TEST_CASE("Bochner check modes") {
  SUBCASE("constant potential on a flat grid") {
    const Grid grid = Grid::cube(3, 8);
    const auto rep = bochner_inequality_check(MetricField::identity(grid), ScalarField(grid, 0.7), false);
    CHECK_FALSE(rep.asserted);
    for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
      CHECK(rep.lhs[i] == 0.0);
      CHECK(rep.rhs[i] == 0.0);
    }
  }
  SUBCASE("non-critical metric with the flag set") {
    const Grid grid = Grid::cube(3, 8);
    const auto g = random_smooth_metric(grid, 5, 0.1);
    CHECK_THROWS_AS(bochner_inequality_check(g, ScalarField(grid, 0.0), true), PreconditionError);
  }
  SUBCASE("two-dimensional separatrix is diagnostic only") {
    const auto surf = reconstruct_surface(integrate_ode(-6.0, -6.0), -6.0, 0.0);
    std::vector<double> f;
    for (double R : warped_curvature(surf.surface).scalar) f.push_back(-std::log(-R));
    const auto rep = bochner_inequality_check(surf.surface, f, false, 10, surf.surface.size() - 10);
    CHECK_FALSE(rep.asserted);
    CHECK(rep.holds);
    CHECK(rep.lhs.size() == surf.surface.size() - 20);
  }
}
