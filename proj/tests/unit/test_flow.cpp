#include <cmath>
#include <algorithm>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/flow.hpp"
#include "curvlab/samples.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {

MetricField perturbed_flat(const Grid& grid, std::uint64_t seed, double amplitude) {
  const auto h = random_smooth_tensor(grid, seed, 1.0);
  TensorField2 g = MetricField::identity(grid).components();
  for (std::size_t i = 0; i < g.raw().size(); ++i) g.raw()[i] += amplitude * h.raw()[i];
  return MetricField(std::move(g));
}

double max_component_difference(const MetricField& a, const MetricField& b) {
  double m = 0.0;
  const auto ra = a.components().raw(), rb = b.components().raw();
  for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
  return m;
}

}  // namespace

TEST_CASE("flat metric is a fixed point") {
  const Grid grid = Grid::cube(3, 8);
  const auto flat = MetricField::identity(grid);
  for (const FunctionalSpec spec : {FunctionalSpec{FiniteT{0.0}}, FunctionalSpec{FiniteT{-0.5}}, FunctionalSpec{SigmaOnly{}}}) {
    const auto step = flow_step(flat, spec, 0.3);
    CHECK(max_component_difference(step.metric, flat) == 0.0);
    CHECK(step.halvings == 0);
    FlowConfig cfg;
    cfg.spec = spec;
    const auto run = run_flow(flat, cfg);
    CHECK(run.trace.stop == FlowStop::ResidualReached);
    CHECK(run.trace.records.size() == 1);
  }
}

TEST_CASE("homogeneous sphere path") {
  const auto S3 = HomogeneousEinstein::unit_sphere(3);
  const double eta = 1e-3;
  CHECK(gradient_coefficient(S3, FiniteT{0.0}) == -2.0);
  const auto s = homogeneous_flow(S3, FiniteT{0.0}, 1.0, eta, 1);
  CHECK(s[1] == 1.0 + 2.0 * eta);

  SUBCASE("scaling covariance") {
    // G(c^2 g) = c^{-2} G(g) for n = 3, so the path from c^2 g with step c^4 eta is c^2 times the path from g
    const auto base = homogeneous_flow(S3, FiniteT{0.0}, 1.0, eta, 50);
    for (double c : {0.5, 2.0, 3.0}) {
      const auto scaled = homogeneous_flow(S3, FiniteT{0.0}, c * c, std::pow(c, 4) * eta, 50);
      for (std::size_t k = 0; k < base.size(); ++k)
        CHECK(scaled[k] == doctest::Approx(c * c * base[k]).epsilon(1e-13));
    }
  }
  SUBCASE("critical sphere at t = -1/3 stays put") {
    const auto fixed = homogeneous_flow(S3, FiniteT{-1.0 / 3.0}, 1.0, 0.1, 20);
    for (double v : fixed) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(homogeneous_flow(S3, FiniteT{0.0}, -1.0, eta, 1), PreconditionError);
}

TEST_CASE("forward then backward step is second order") {
  const Grid grid = Grid::cube(3, 10);
  const auto g = random_smooth_metric(grid, 21, 0.1);
  double previous = 0.0;
  for (double eta : {1e-2, 5e-3, 2.5e-3}) {
    const auto fwd = flow_step(g, FiniteT{0.0}, eta);
    REQUIRE(fwd.step_used == eta);
    const auto back = flow_step(fwd.metric, FiniteT{0.0}, -eta);
    const double err = max_component_difference(back.metric, g);
    CHECK(err > 0.0);
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("positive-definiteness rejection halves the step") {
  const Grid grid = Grid::cube(3, 8);
  const auto g = random_smooth_metric(grid, 3, 0.3);
  const auto G = gradient(g, FiniteT{0.0}, Stencil::Spectral);
  REQUIRE(G.sup_norm > 0.0);
  const double huge = 100.0 / G.sup_norm;
  const auto step = flow_step(g, FiniteT{0.0}, huge);
  CHECK(step.halvings > 0);
  CHECK(step.step_used == huge * std::pow(0.5, step.halvings));
  CHECK(step.metric.min_eigenvalue() > 0.0);
  CHECK_THROWS_AS(flow_step(g, FiniteT{0.0}, huge, Stencil::Spectral, 0), DegenerateMetricError);
}

TEST_CASE("preconditioner multiplier") {
  const Grid grid = Grid::cube(3, 8);
  TensorField2 T(grid);
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    T.at(p, 0, 0) = 2.0;
    T.at(p, 0, 1) = std::sin(grid.coordinate(p, 1));
    T.at(p, 1, 2) = std::cos(grid.coordinate(p, 0) + 2.0 * grid.coordinate(p, 2));
  }
  const auto P = precondition(T);
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    CHECK(P.at(p, 0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(P.at(p, 0, 1) - T.at(p, 0, 1) / 4.0) < 1e-14);
    CHECK(std::abs(P.at(p, 1, 2) - T.at(p, 1, 2) / 36.0) < 1e-14);
    CHECK(std::abs(P.at(p, 2, 2)) < 1e-15);
  }
  std::vector<double> v;
  for (int i = 0; i < 16; ++i) v.push_back(std::cos(3.0 * 2.0 * std::numbers::pi * i / 16.0));
  const auto pv = precondition_periodic(v, 2.0 * std::numbers::pi);
  for (int i = 0; i < 16; ++i) CHECK(std::abs(pv[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)] / 100.0) < 1e-15);
}

TEST_CASE("perturbed flat torus flows to flat") {
  const Grid grid = Grid::cube(3, 12);
  const auto g0 = perturbed_flat(grid, 11, 0.01);
  FlowConfig cfg;
  cfg.spec = FiniteT{0.0};
  cfg.preconditioner = Preconditioner::Bilaplacian;
  cfg.target = FlowTarget::GradientSup;
  cfg.residual_target = 1e-5;
  cfg.max_steps = 200;
  const auto run = run_flow(g0, cfg);
  CHECK(run.trace.stop == FlowStop::ResidualReached);
  CHECK(run.trace.monotone());
  for (std::size_t i = 1; i < run.trace.records.size(); ++i)
    CHECK(run.trace.records[i].value < run.trace.records[i - 1].value);
  CHECK(run.trace.records.back().ricci_sup < 1e-5);
  // the terminal metric passes the target under the independent three-dimensional assembly
  CHECK(dim3_gradient(run.metric, 0.0, Stencil::Spectral).sup_norm < cfg.residual_target);
}

TEST_CASE("plain descent without line search") {
  const Grid grid = Grid::cube(3, 8);
  const auto g0 = perturbed_flat(grid, 4, 0.01);
  FlowConfig cfg;
  cfg.line_search = false;
  cfg.step = 1e-4;
  cfg.max_steps = 5;
  const auto run = run_flow(g0, cfg);
  CHECK(run.trace.stop == FlowStop::MaxSteps);
  CHECK(run.trace.records.size() == 6);
  for (std::size_t i = 0; i + 1 < run.trace.records.size(); ++i) CHECK(run.trace.records[i].step_size == 1e-4);
  CHECK(run.trace.monotone());
}

TEST_CASE("warped profile flow") {
  WarpedProductMetric::Options opt;
  opt.periodic = true;
  const int N = 48;
  std::vector<double> phi;
  for (int i = 0; i < N; ++i) phi.push_back(1.0 + 0.05 * std::sin(2.0 * std::numbers::pi * i / N));
  const WarpedProductMetric w0(3, 0.0, 2.0 * std::numbers::pi, phi, opt);

  SUBCASE("flows to a constant profile") {
    FlowConfig cfg;
    cfg.preconditioner = Preconditioner::Bilaplacian;
    cfg.max_steps = 500;
    const auto run = warped_flow(w0, cfg);
    CHECK(run.trace.stop == FlowStop::ResidualReached);
    CHECK(run.trace.records.back().grad_sup < 1e-6);
    CHECK(run.trace.monotone());
    const auto [lo, hi] = std::ranges::minmax(run.profile.phi());
    CHECK(hi - lo < 1e-3);
  }
  SUBCASE("constant profile is fixed") {
    const auto run = warped_flow(w0.with_profile(std::vector<double>(N, 1.0)), FlowConfig{});
    CHECK(run.trace.stop == FlowStop::ResidualReached);
    CHECK(run.trace.records.size() == 1);
  }
  SUBCASE("t = -1/2 is recorded without a flatness claim") {
    FlowConfig cfg;
    cfg.spec = FiniteT{-0.5};
    cfg.preconditioner = Preconditioner::Bilaplacian;
    cfg.max_steps = 30;
    const auto run = warped_flow(w0, cfg);
    CHECK(run.trace.records.size() >= 2);
    CHECK(run.trace.monotone());
  }
  SUBCASE("non-periodic profiles refuse the preconditioner") {
    const WarpedProductMetric open(3, 0.0, 1.0, std::vector<double>(30, 1.0), {});
    FlowConfig cfg;
    cfg.preconditioner = Preconditioner::Bilaplacian;
    CHECK_THROWS_AS(warped_flow(open, cfg), ConfigurationError);
  }
}

TEST_CASE("flow configuration") {
  FlowConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigurationError);
  cfg = FlowConfig{};
  cfg.armijo = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigurationError);
  CHECK(flow_target_from_string("ricci") == FlowTarget::RicciSup);
  CHECK(preconditioner_from_string("bilaplacian") == Preconditioner::Bilaplacian);
  CHECK_THROWS_AS(flow_target_from_string("bogus"), ConfigurationError);
  CHECK(to_string(FlowStop::LineSearchFailed) == "line_search_failed");
}
