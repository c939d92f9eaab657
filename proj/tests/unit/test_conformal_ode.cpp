#include <cmath>
#include <random>

#include "curvlab/conformal_ode.hpp"
#include "curvlab/errors.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {

// Exact separatrix solution through (f0, fp0) with fp0 = -+sqrt(-f0^3/6):
// f = -24 / (r - r_b)^2.
double separatrix_f(double r, double rb) { return -24.0 / ((r - rb) * (r - rb)); }

}  // namespace

TEST_CASE("energy") {
  CHECK(energy(0.0, 0.0) == 0.0);
  CHECK(energy(0.0, 1.0) == 1.0);
  CHECK(energy(-6.0, 6.0) == 0.0);
  CHECK(energy(OdeState{3.0, -6.0, -6.0}) == 0.0);
}

TEST_CASE("trivial solution") {
  const auto sol = integrate_ode(0.0, 0.0);
  CHECK(sol.family == Family::Trivial);
  for (const auto& s : sol.samples) {
    CHECK(s.f == 0.0);
    CHECK(s.fp == 0.0);
  }
  CHECK(sol.lower.kind == EndKind::SpanLimit);
  CHECK(sol.upper.kind == EndKind::SpanLimit);
  CHECK(family_inconsistency(sol).empty());
  const auto d = maximal_domain(0.0, 0.0);
  CHECK_FALSE(d.lower_finite);
  CHECK_FALSE(d.upper_finite);
}

TEST_CASE("unit slope through zero") {
  const auto sol = integrate_ode(0.0, 1.0);
  CHECK(sol.energy == 1.0);
  CHECK(sol.family == Family::FamilyOne);
  REQUIRE(sol.critical.has_value());
  CHECK(std::abs(sol.critical->f - std::cbrt(6.0)) < 1e-9);
  CHECK(std::abs(sol.critical->fp) < 1e-9);
  CHECK(sol.max_energy_drift < 1e-10);
  CHECK(sol.lower.kind == EndKind::BlowUp);
  CHECK(sol.upper.kind == EndKind::BlowUp);
  CHECK(family_inconsistency(sol).empty());

  const auto d = maximal_domain(0.0, 1.0);
  CHECK(d.lower_finite);
  CHECK(d.upper_finite);
  CHECK(d.turning == doctest::Approx(std::cbrt(6.0)).epsilon(1e-15));
  CHECK(std::abs(d.upper - sol.upper.extrapolated) < 1e-3 * std::abs(d.upper));
  CHECK(std::abs(d.lower - sol.lower.extrapolated) < 1e-3 * std::abs(d.lower));
  // the critical point sits at the midpoint of the domain
  CHECK(0.5 * (d.lower + d.upper) == doctest::Approx(sol.critical->r).epsilon(1e-8));
}

TEST_CASE("negative maximum") {
  const auto sol = integrate_ode(-1.0, 0.0);
  CHECK(sol.family == Family::FamilyOne);
  REQUIRE(sol.critical.has_value());
  CHECK(sol.critical->f == -1.0);
  for (const auto& s : sol.samples) CHECK(s.f <= -1.0);
  CHECK(sol.lower.kind == EndKind::BlowUp);
  CHECK(sol.upper.kind == EndKind::BlowUp);
  CHECK(family_inconsistency(sol).empty());
  const auto d = maximal_domain(-1.0, 0.0);
  CHECK(d.upper == doctest::Approx(-d.lower).epsilon(1e-14));
  CHECK(std::abs(d.upper - sol.upper.extrapolated) < 1e-3 * d.upper);
}

TEST_CASE("separatrix branches match the exact solution") {
  SUBCASE("decreasing branch") {
    const auto sol = integrate_ode(-6.0, -6.0);
    CHECK(sol.family == Family::FamilyTwo);
    CHECK(family_inconsistency(sol).empty());
    CHECK(sol.max_energy_drift < 1e-10);
    double err = 0.0;
    for (const auto& s : sol.samples)
      if (s.r > -20.0 && s.r < 1.9) err = std::max(err, std::abs(s.f / separatrix_f(s.r, 2.0) - 1.0));
    CHECK(err < 1e-7);
    CHECK(sol.upper.extrapolated == doctest::Approx(2.0).epsilon(1e-7));
    const auto d = maximal_domain(-6.0, -6.0);
    CHECK_FALSE(d.lower_finite);
    CHECK(d.upper == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("increasing branch") {
    const auto sol = integrate_ode(-6.0, 6.0);
    CHECK(sol.family == Family::FamilyThree);
    CHECK(family_inconsistency(sol).empty());
    CHECK(sol.lower.extrapolated == doctest::Approx(-2.0).epsilon(1e-7));
    const auto d = maximal_domain(-6.0, 6.0);
    CHECK_FALSE(d.upper_finite);
    CHECK(d.lower == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("finite endpoint 2 sqrt(6) / sqrt(|f0|)") {
    for (double f0 : {-0.5, -3.0, -40.0}) {
      const double fp0 = -std::sqrt(-f0 * f0 * f0 / 6.0);
      const auto d = maximal_domain(f0, fp0, 1.5);
      CHECK(d.upper == doctest::Approx(1.5 + 2.0 * std::sqrt(6.0 / -f0)).epsilon(1e-12));
    }
  }
  SUBCASE("separatrix identity f'^2 = |f|^3 / 6") {
    const auto sol = integrate_ode(-2.0, -std::sqrt(8.0 / 6.0));
    for (const auto& s : sol.samples)
      CHECK(s.fp * s.fp == doctest::Approx(std::abs(s.f * s.f * s.f) / 6.0).epsilon(1e-9));
  }
}

TEST_CASE("time reversal") {
  for (auto [f0, fp0] : {std::pair{0.3, 1.2}, std::pair{-2.0, -0.7}, std::pair{-6.0, 6.0}}) {
    const auto a = integrate_ode(f0, fp0);
    const auto b = integrate_ode(f0, -fp0);
    REQUIRE(a.samples.size() == b.samples.size());
    const std::size_t m = a.samples.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& s = a.samples[i];
      const auto& t = b.samples[m - 1 - i];
      CHECK(s.r == -t.r);
      CHECK(s.f == t.f);
      CHECK(s.fp == -t.fp);
    }
    CHECK(a.upper.extrapolated == -b.lower.extrapolated);
  }
}

TEST_CASE("random initial data") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double f0 = U(rng), fp0 = U(rng);
    const auto sol = integrate_ode(f0, fp0);
    CHECK(sol.family != Family::Trivial);
    CHECK(family_inconsistency(sol) == "");
    CHECK(sol.max_energy_drift < 1e-10);
    const auto d = maximal_domain(f0, fp0);
    if (d.upper_finite && sol.upper.kind == EndKind::BlowUp) {
      CHECK(std::abs(d.upper - sol.upper.extrapolated) < 1e-3 * std::max(1.0, std::abs(d.upper)));
      ++checked;
    }
    if (d.lower_finite && sol.lower.kind == EndKind::BlowUp)
      CHECK(std::abs(d.lower - sol.lower.extrapolated) < 1e-3 * std::max(1.0, std::abs(d.lower)));
  }
  CHECK(checked == 100);
}

TEST_CASE("uniform sampling lands on the nodes") {
  const auto st = sample_uniform({0.0, -6.0, -6.0}, -3.0, 1.0, 9);
  REQUIRE(st.size() == 9);
  for (int i = 0; i < 9; ++i) {
    CHECK(st[static_cast<std::size_t>(i)].r == doctest::Approx(-3.0 + 0.5 * i).epsilon(1e-15));
    CHECK(st[static_cast<std::size_t>(i)].f == doctest::Approx(separatrix_f(-3.0 + 0.5 * i, 2.0)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(sample_uniform({0.0, -6.0, -6.0}, -1.0, 2.5, 9), PreconditionError);
}

TEST_CASE("surface reconstruction") {
  SUBCASE("separatrix surface") {
    const auto sol = integrate_ode(-6.0, -6.0);
    for (auto [a, b] : {std::pair{-6.0, 0.0}, std::pair{-5.0, 1.0}, std::pair{-20.0, -2.0}}) {
      const auto rep = reconstruct_surface(sol, a, b);
      CHECK(rep.states.size() == 401);
      CHECK(rep.states.front().r == doctest::Approx(a));
      CHECK(rep.states.back().r == doctest::Approx(b));
      CHECK(rep.scalar_error < 1e-6);
      CHECK(rep.hessian_residual < 1e-6);
    }
  }
  SUBCASE("increasing side of a bounded solution") {
    const auto sol = integrate_ode(0.0, 1.0);
    REQUIRE(sol.critical.has_value());
    const auto rep = reconstruct_surface(sol, sol.critical->r - 2.0, sol.critical->r - 0.3);
    CHECK(rep.scalar_error < 1e-6);
    CHECK(rep.hessian_residual < 1e-6);
    CHECK_THROWS_AS(reconstruct_surface(sol, sol.critical->r - 0.5, sol.critical->r + 0.5), PreconditionError);
  }
  SUBCASE("constant profile is a flat cylinder") {
    const WarpedProductMetric cyl(2, 0.0, 3.0, std::vector<double>(31, 1.0), {});
    for (double R : warped_curvature(cyl).scalar) CHECK(R == 0.0);
  }
}

TEST_CASE("bad input") {
  CHECK_THROWS_AS(integrate_ode(std::nan(""), 0.0), PreconditionError);
  OdeOptions opt;
  opt.r0 = 200.0;
  CHECK_THROWS_AS(integrate_ode(0.0, 1.0, opt), ConfigurationError);
}
