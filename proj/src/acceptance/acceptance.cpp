#include "curvlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "curvlab/conformal_ode.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/flow.hpp"
#include "curvlab/functionals.hpp"
#include "curvlab/rigidity.hpp"
#include "curvlab/samples.hpp"

namespace curvlab {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

// ------------------------------------------------------ random metric suite

constexpr int kSuiteSize = 20;
constexpr int kSuitePoints = 32;

struct SuiteNeeds {
  bool gateaux = false;
  bool trace = false;
  bool weyl_dim3 = false;
};

struct SuiteResult {
  double worst_gateaux = 0.0;
  std::string worst_gateaux_where;
  double worst_trace = 0.0;
  double worst_weyl = 0.0;
  double worst_dim3 = 0.0;
};

double max_diff(const TensorField2& a, const TensorField2& b) {
  double m = 0.0;
  const auto ra = a.raw(), rb = b.raw();
  for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
  return m;
}

const std::vector<FunctionalSpec> kSuiteSpecs{FiniteT{-1.0 / 3.0}, FiniteT{0.0}, FiniteT{1.0}, SigmaOnly{}};

SuiteResult run_suite(std::uint64_t seed, SuiteNeeds needs) {
  SuiteResult out;
  const Grid grid = Grid::cube(3, kSuitePoints);
  for (int m = 0; m < kSuiteSize; ++m) {
    const auto g = random_smooth_metric(grid, seed + static_cast<std::uint64_t>(m), 0.12);
    if (needs.gateaux) {
      const auto h = random_smooth_tensor(grid, seed + 1000 + static_cast<std::uint64_t>(m), 1.0);
      for (const auto& r : gateaux_fd_check(g, kSuiteSpecs, h, default_epsilon_ladder(), Stencil::Spectral))
        if (r.best_relative_error >= out.worst_gateaux) {
          out.worst_gateaux = r.best_relative_error;
          out.worst_gateaux_where = "metric " + std::to_string(m) + ", " + to_string(r.spec);
        }
    }
    if (needs.trace || needs.weyl_dim3) {
      const auto terms = gradient_terms(g, Stencil::Spectral);
      if (needs.trace)
        for (const auto& spec : kSuiteSpecs)
          out.worst_trace = std::max(out.worst_trace, trace_identity_residual(terms, g, spec).max_abs());
      if (needs.weyl_dim3) {
        for (double t : {-1.0 / 3.0, 0.0, 1.0})
          out.worst_dim3 = std::max(
              out.worst_dim3, max_diff(assemble_gradient(terms, g, FiniteT{t}).gradient, dim3_gradient(terms, g, t).gradient));
        out.worst_weyl = std::max(out.worst_weyl, curvature_bundle(g, Stencil::Spectral).weyl.max_abs());
      }
    }
  }
  return out;
}

std::string suite_label() {
  return std::to_string(kSuiteSize) + " metrics at " + std::to_string(kSuitePoints) + "^3";
}

Outcome gateaux_criterion(const SuiteResult& s) {
  const bool ok = s.worst_gateaux < 1e-5;
  return {ok, "worst best-epsilon relative error " + sci(s.worst_gateaux) + " (" + s.worst_gateaux_where +
                  ") < 1e-5 over " + suite_label() + " x 4 specs"};
}

Outcome trace_criterion(const SuiteResult& s) {
  return {s.worst_trace < 1e-6, "sup residual " + sci(s.worst_trace) + " < 1e-6 over " + suite_label() + " x 4 specs"};
}

Outcome weyl_criterion(const SuiteResult& s) {
  const bool ok = s.worst_weyl < 1e-10 && s.worst_dim3 < 1e-10;
  return {ok, "max |W| " + sci(s.worst_weyl) + " < 1e-10, assembly gap " + sci(s.worst_dim3) + " < 1e-10 over " +
                  suite_label()};
}

// ------------------------------------------------------ known critical points

Outcome known_critical_points() {
  std::ostringstream os;
  bool ok = true;
  auto note = [&](bool pass, const std::string& what) {
    ok = ok && pass;
    if (os.tellp() > 0) os << "; ";
    os << (pass ? "" : "FAILED ") << what;
  };

  double flat_homog = 0.0, flat_grid = 0.0;
  const auto flat_grid_metric = MetricField::identity(Grid::cube(3, 8));
  for (int n = 2; n <= 5; ++n)
    for (const auto& spec : kSuiteSpecs)
      flat_homog = std::max(flat_homog, std::abs(gradient_coefficient(HomogeneousEinstein::flat(n), spec)));
  for (const auto& spec : kSuiteSpecs)
    flat_grid = std::max(flat_grid, gradient(flat_grid_metric, spec, Stencil::Spectral).sup_norm);
  note(flat_homog < 1e-12 && flat_grid < 1e-12,
       "flat " + sci(flat_homog) + " (closed form, n=2..5), " + sci(flat_grid) + " (grid)");

  const auto s3 = HomogeneousEinstein::unit_sphere(3);
  const double s3_crit = std::abs(gradient_coefficient(s3, FiniteT{-1.0 / 3.0}));
  note(s3_crit < 1e-10, "S3 t=-1/3 " + sci(s3_crit));
  const double s3_zero = gradient_coefficient(s3, FiniteT{0.0});
  note(s3_zero == -2.0, "S3 t=0 coefficient " + sci(s3_zero) + " == -2");

  const double h4 = std::abs(gradient_coefficient(HomogeneousEinstein::hyperbolic(4), SigmaOnly{}));
  note(h4 < 1e-10, "H4 sigma " + sci(h4));
  const double h5 = gradient_coefficient(HomogeneousEinstein::hyperbolic(5), SigmaOnly{});
  note(h5 == 40.0, "H5 sigma coefficient " + sci(h5) + " == 40");
  return {ok, os.str()};
}

// ------------------------------------------------------------------ ODE suite

Outcome ode_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  double worst_drift = 0.0, worst_endpoint = 0.0;
  int inconsistent = 0, endpoints = 0;
  std::string first_problem;
  auto check = [&](double f0, double fp0) {
    const auto sol = integrate_ode(f0, fp0);
    worst_drift = std::max(worst_drift, sol.max_energy_drift);
    if (const auto why = family_inconsistency(sol); !why.empty()) {
      ++inconsistent;
      if (first_problem.empty()) first_problem = "(" + sci(f0) + ", " + sci(fp0) + "): " + why;
    }
    const auto d = maximal_domain(f0, fp0);
    auto compare = [&](bool finite, const DomainEnd& end, double quad) {
      if (!finite || end.kind != EndKind::BlowUp) return;
      ++endpoints;
      worst_endpoint = std::max(worst_endpoint, std::abs(quad - end.extrapolated) / std::max(1.0, std::abs(quad)));
    };
    compare(d.upper_finite, sol.upper, d.upper);
    compare(d.lower_finite, sol.lower, d.lower);
    return sol;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const double f0 = U(rng), fp0 = U(rng);
    check(f0, fp0);
  }
  for (auto [f0, fp0] : {std::pair{-6.0, -6.0}, std::pair{-6.0, 6.0}, std::pair{-1.0, 0.0}, std::pair{2.0, 0.0}})
    check(f0, fp0);
  const auto unit = check(0.0, 1.0);
  const double fmax_err = unit.critical ? std::abs(unit.critical->f - std::cbrt(6.0))
                                        : std::numeric_limits<double>::infinity();

  const bool ok = worst_drift < 1e-10 && fmax_err < 1e-9 && inconsistent == 0 && worst_endpoint < 1e-3;
  std::string detail = "drift " + sci(worst_drift) + " < 1e-10; f_max error " + sci(fmax_err) +
                       " < 1e-9; inconsistent families " + std::to_string(inconsistent) +
                       "/105; endpoint gap " + sci(worst_endpoint) + " < 1e-3 over " + std::to_string(endpoints) +
                       " blow-ups";
  if (!first_problem.empty()) detail += "; " + first_problem;
  return {ok, detail};
}

// --------------------------------------------------------- surface criteria

Outcome surface_reconstruction() {
  const auto sol = integrate_ode(-6.0, -6.0);
  double scalar = 0.0, hess = 0.0;
  for (auto [a, b] : {std::pair{-6.0, 0.0}, std::pair{-5.0, 1.0}, std::pair{-20.0, -2.0}}) {
    const auto rep = reconstruct_surface(sol, a, b);
    scalar = std::max(scalar, rep.scalar_error);
    hess = std::max(hess, rep.hessian_residual);
  }
  return {scalar < 1e-6 && hess < 1e-6, "max |R - f| " + sci(scalar) + " < 1e-6, Hessian residual " + sci(hess) +
                                            " < 1e-6 on [-6,0], [-5,1], [-20,-2]"};
}

Outcome integral_estimate() {
  // separatrix through f(0) = -1, ball centred at r = 0
  const auto sol = integrate_ode(-1.0, -std::sqrt(1.0 / 6.0));
  double stated_min = std::numeric_limits<double>::infinity(), cutoff_min = stated_min;
  int failing = 0, cases = 0;
  std::ostringstream os;
  for (auto [s1, s2] : {std::pair{1.0, 2.0}, std::pair{0.5, 1.5}}) {
    const auto surf = reconstruct_surface(sol, -s2, s2, 801);
    for (double alpha : {0.0, 1.0, 2.0}) {
      const auto rep = integral_estimate_check(surf.surface, 0.0, alpha, CutoffProfile{s1, s2, 2.0});
      ++cases;
      if (!(rep.stated_margin > 0.0)) {
        ++failing;
        os << " (s1=" << s1 << " s2=" << s2 << " alpha=" << alpha << ": " << sci(rep.stated_margin) << ")";
      }
      stated_min = std::min(stated_min, rep.stated_margin);
      cutoff_min = std::min(cutoff_min, rep.cutoff_margin);
    }
  }
  std::string detail = "closed-ball margin min " + sci(stated_min) + ", " + std::to_string(failing) + "/" +
                       std::to_string(cases) + " cases non-positive" + os.str() + "; cutoff-weighted margin min " +
                       sci(cutoff_min);
  return {failing == 0, detail};
}

Outcome separatrix_ratio() {
  double worst = 0.0;
  for (auto [fp0, a, b] : {std::tuple{-6.0, -6.0, 0.0}, std::tuple{6.0, 0.0, 6.0}}) {
    const auto surf = reconstruct_surface(integrate_ode(-6.0, fp0), a, b);
    const auto rep = gradient_estimate_probe(surf.surface, 10, surf.surface.size() - 10);
    worst = std::max({worst, std::abs(rep.sup_ratio_cube - 1.0 / 6.0), std::abs(rep.inf_ratio_cube - 1.0 / 6.0)});
  }
  return {worst < 1e-8, "max | |dR|^2/|R|^3 - 1/6 | " + sci(worst) + " < 1e-8 on both separatrix branches"};
}

// ------------------------------------------------------------ rigidity lab

Outcome constants_table() {
  bool agree = true, above = true;
  double worst_q = 0.0, min_q = std::numeric_limits<double>::infinity();
  for (int n = 5; n <= 64; ++n) {
    const auto k = compute_constants(n);
    agree = agree && k.delta2_agree;
    worst_q = std::max(worst_q, std::abs(k.q_star - k.q_star_closed));
    min_q = std::min(min_q, k.q_star);
    above = above && k.q_star > 2.0;
  }
  const auto k5 = compute_constants(5);
  const bool row = k5.a_exact == "64" && k5.b_exact == "128" && k5.c_exact == "44" && k5.delta2_exact == "5120";
  const bool ok = agree && above && worst_q < 1e-12 && row;
  return {ok, std::string("n=5..64: discriminant routes ") + (agree ? "agree" : "DISAGREE") + ", q* gap " +
                  sci(worst_q) + " < 1e-12, min q* " + sci(min_q) + " > 2; n=5 row (" + k5.a_exact + ", " +
                  k5.b_exact + ", " + k5.c_exact + ", " + k5.delta2_exact + ")"};
}

Outcome quadratic_negativity_criterion() {
  int cases = 0, bad = 0;
  double worst_gap = 0.0, min_lambda = std::numeric_limits<double>::infinity();
  for (int n = 5; n <= 12; ++n) {
    const auto k = compute_constants(n);
    for (double A : interior_points(k, 5)) {
      const auto rep = quadratic_negativity(n, A);
      ++cases;
      if (!rep.lambda || !(*rep.lambda > 0.0) || !rep.sampled_below) ++bad;
      if (rep.lambda) min_lambda = std::min(min_lambda, *rep.lambda);
      worst_gap = std::max(worst_gap, rep.vertex_gap);
    }
  }
  return {bad == 0 && worst_gap < 1e-12, "lambda > 0 in " + std::to_string(cases - bad) + "/" +
                                             std::to_string(cases) + " cases (min " + sci(min_lambda) +
                                             "), sampled vs vertex gap " + sci(worst_gap) + " < 1e-12"};
}

Outcome hessian_criterion(std::uint64_t seed) {
  struct Case {
    int n, points;
  };
  std::size_t samples = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t k = 0;
  for (const Case c : {Case{3, 24}, Case{3, 24}, Case{4, 12}, Case{4, 12}, Case{5, 8}}) {
    ++k;
    const Grid grid = Grid::cube(c.n, c.points);
    const auto g = random_smooth_metric(grid, seed + 100 + k, 0.1);
    const auto w = random_smooth_scalar(grid, seed + 200 + k, 1.0);
    const auto rep = hessian_inequality_field(g, w, Stencil::Spectral, 1e-6);
    samples += rep.samples;
    violations += rep.violations;
    worst = std::min(worst, rep.worst_relative);
  }
  return {violations == 0 && samples >= 100000,
          std::to_string(violations) + " violations beyond 1e-6 in " + std::to_string(samples) +
              " samples (n=3,4,5; >= 100000 required), worst relative margin " + sci(worst)};
}

// --------------------------------------------------------------- flow probes

Outcome flow_probes(std::uint64_t seed) {
  const Grid grid = Grid::cube(3, 24);
  const auto g0 = random_smooth_metric(grid, seed + 7, 0.01);
  FlowConfig cfg;
  cfg.preconditioner = Preconditioner::Bilaplacian;
  cfg.residual_target = 1e-6;

  cfg.spec = FiniteT{0.0};
  cfg.target = FlowTarget::RicciSup;
  cfg.max_steps = 200;
  const auto ricci = run_flow(g0, cfg);

  cfg.spec = SigmaOnly{};
  cfg.target = FlowTarget::ScalarSup;
  cfg.max_steps = 150;
  const auto sigma = run_flow(g0, cfg);

  const auto& rl = ricci.trace.records.back();
  const auto& sl = sigma.trace.records.back();
  const double scalar_sup = std::max(std::abs(sl.scalar_min), std::abs(sl.scalar_max));
  const bool ricci_ok = ricci.trace.stop == FlowStop::ResidualReached;
  const bool sigma_ok = sigma.trace.stop == FlowStop::ResidualReached;
  const bool mono = ricci.trace.monotone() && sigma.trace.monotone();
  std::ostringstream os;
  os << "t=0: |Ric| " << sci(rl.ricci_sup) << " after " << rl.step << " steps (" << to_string(ricci.trace.stop)
     << "); sigma: |R| " << sci(scalar_sup) << ", |Ric| " << sci(sl.ricci_sup) << " after " << sl.step
     << " steps (" << to_string(sigma.trace.stop) << "); monotone " << (mono ? "yes" : "NO");
  return {ricci_ok && sigma_ok && mono, os.str()};
}

const char* kTitles[kCriterionCount] = {
    "Gateaux master check",
    "Trace identity",
    "Known critical points",
    "3D Weyl vanishing and contraction identity",
    "ODE suite",
    "Surface reconstruction",
    "Constants table",
    "Quadratic negativity",
    "Hessian inequality",
    "Integral estimate",
    "Separatrix gradient ratio",
    "Flow probes",
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::set<int> wanted(options.only.begin(), options.only.end());
  if (wanted.empty())
    for (int i = 1; i <= kCriterionCount; ++i) wanted.insert(i);
  for (int id : wanted)
    if (id < 1 || id > kCriterionCount)
      throw ConfigurationError("acceptance criterion " + std::to_string(id) + " does not exist (1.." +
                               std::to_string(kCriterionCount) + ")");

  std::vector<CriterionResult> results;
  auto emit = [&](int id, Outcome o, double seconds) {
    CriterionResult r{id, kTitles[id - 1], o.passed, std::move(o.detail), seconds};
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  };
  using clock = std::chrono::steady_clock;
  auto seconds_since = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };

  // criteria 1, 2 and 4 share one pass over the random metrics
  const SuiteNeeds needs{wanted.contains(1), wanted.contains(2), wanted.contains(4)};
  std::optional<SuiteResult> suite;
  auto ensure_suite = [&] {
    if (!suite) suite = run_suite(options.seed, needs);
  };

  for (int id : wanted) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      switch (id) {
        case 1: ensure_suite(); o = gateaux_criterion(*suite); break;
        case 2: ensure_suite(); o = trace_criterion(*suite); break;
        case 3: o = known_critical_points(); break;
        case 4: ensure_suite(); o = weyl_criterion(*suite); break;
        case 5: o = ode_suite(options.seed); break;
        case 6: o = surface_reconstruction(); break;
        case 7: o = constants_table(); break;
        case 8: o = quadratic_negativity_criterion(); break;
        case 9: o = hessian_criterion(options.seed); break;
        case 10: o = integral_estimate(); break;
        case 11: o = separatrix_ratio(); break;
        case 12: o = flow_probes(options.seed); break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    // the shared pass is charged to the first criterion that triggers it
    emit(id, std::move(o), seconds_since(t0));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  %-44s", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str());
  char tail[32];
  std::snprintf(tail, sizeof tail, "  [%.1f s]", r.seconds);
  return std::string(head) + r.detail + tail;
}

}  // namespace curvlab
