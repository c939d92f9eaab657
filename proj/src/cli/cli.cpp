#include "curvlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "curvlab/acceptance.hpp"
#include "curvlab/conformal_ode.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/field_io.hpp"
#include "curvlab/flow.hpp"
#include "curvlab/functionals.hpp"
#include "curvlab/rigidity.hpp"
#include "flow_config.hpp"
#include "manifest.hpp"
#include "presets.hpp"
#include "svg.hpp"

namespace curvlab {

namespace {

namespace fs = std::filesystem;
using cli::Manifest;

/// Shortest round-trip decimal form, so CSV bytes depend only on the values.
std::string csv(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

struct Common {
  std::string out_dir = ".";
  std::string manifest = "manifest.json";
  bool no_manifest = false;
  std::uint64_t seed = 20240601;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out-dir", c.out_dir, "Directory for every artifact")->capture_default_str();
  sub->add_option("--manifest", c.manifest, "Manifest file name inside --out-dir")->capture_default_str();
  sub->add_flag("--no-manifest", c.no_manifest, "Do not write a manifest");
  sub->add_option("--seed", c.seed, "Seed for randomized presets and suites")->capture_default_str();
}

/// Writes through a temporary string so the file and its digest agree.
struct Artifacts {
  const Common& common;
  Manifest& manifest;

  fs::path path(const std::string& name) const { return fs::path(common.out_dir) / name; }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(common.out_dir);
    const auto p = path(name);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw FormatError("cannot write '" + p.string() + "'");
    body(f);
    f.close();
    manifest.add_output(name, p);
  }
};

struct MetricSource {
  std::string builtin;
  std::string file;
  cli::PresetOptions preset;
};

void add_metric_source(CLI::App* sub, MetricSource& m) {
  auto* b = sub->add_option("--builtin", m.builtin, "Built-in metric preset (see --list-presets)");
  auto* f = sub->add_option("--metric", m.file, "Metric field file (CSV or .bin)")->check(CLI::ExistingFile);
  b->excludes(f);
  sub->add_option("--points", m.preset.points, "Grid points per axis for grid presets (0: preset default)");
  sub->add_option("--amplitude", m.preset.amplitude, "Perturbation amplitude for random presets (0: default)");
}

cli::ResolvedMetric resolve(const MetricSource& m, const Common& c, Manifest& manifest) {
  if (m.builtin.empty() == m.file.empty()) throw ConfigurationError("give exactly one of --builtin or --metric");
  auto& p = manifest.parameters();
  if (!m.file.empty()) {
    manifest.add_input(m.file);
    p["metric"] = m.file;
    return cli::load_metric_file(m.file);
  }
  cli::PresetOptions opt = m.preset;
  opt.seed = c.seed;
  p["builtin"] = m.builtin;
  p["points"] = opt.points;
  p["amplitude"] = opt.amplitude;
  return cli::resolve_preset(m.builtin, opt);
}

void describe(std::ostream& out, const cli::ResolvedMetric& m, Stencil stencil) {
  out << "metric: " << m.label;
  if (m.grid) {
    const Grid& g = m.grid->grid();
    out << " (grid " << g.points() << "^" << g.dimension() << ", stencil " << to_string(stencil) << ")";
  } else if (m.homogeneous) {
    out << " (closed form, n = " << m.homogeneous->n << ")";
  } else {
    out << " (warped, n = " << m.warped->dimension() << ", " << m.warped->size() << " samples on ["
        << fixed(m.warped->r_lo()) << ", " << fixed(m.warped->r_hi()) << "])";
  }
  out << "\n";
}

double sqrt_max(const ScalarField& s) {
  double m = 0.0;
  for (double v : s.values()) m = std::max(m, v);
  return std::sqrt(m);
}

// ----------------------------------------------------------------- curvature

struct CurvatureArgs {
  MetricSource source;
  std::string stencil = "order4";
  std::string csv_name = "curvature.csv";
  std::string ricci_name;
};

int cmd_curvature(const CurvatureArgs& a, const Common& c, Manifest& manifest, std::ostream& out) {
  const Stencil stencil = stencil_from_string(a.stencil);
  manifest.parameters()["stencil"] = to_string(stencil);
  const auto m = resolve(a.source, c, manifest);
  Artifacts art{c, manifest};
  describe(out, m, stencil);
  nlohmann::json result;

  if (m.grid) {
    const int n = m.grid->dimension();
    const auto core = curvature_core(*m.grid, stencil);
    ScalarField traceless(m.grid->grid());
    for (std::size_t p = 0; p < traceless.size(); ++p)
      traceless[p] = std::max(0.0, core.ricci_norm2[p] - core.scalar[p] * core.scalar[p] / n);
    result = {{"scalar_min", core.scalar.min()},
              {"scalar_max", core.scalar.max()},
              {"ricci_sup", sqrt_max(core.ricci_norm2)},
              {"traceless_ricci_sup", sqrt_max(traceless)},
              {"min_eigenvalue", m.grid->min_eigenvalue()}};
    out << "scalar curvature: min " << fixed(core.scalar.min()) << ", max " << fixed(core.scalar.max()) << "\n"
        << "|Ric|_g sup " << fixed(result["ricci_sup"]) << ", |Ric0|_g sup " << fixed(result["traceless_ricci_sup"])
        << "\n";
    const double riemann_doubles = static_cast<double>(m.grid->grid().node_count()) * std::pow(n, 4);
    if (n >= 3 && riemann_doubles < 5e7) {
      const double w = curvature_bundle(*m.grid, stencil).weyl.max_abs();
      result["weyl_max_component"] = w;
      out << "Weyl max component " << fixed(w) << (n == 3 ? " (vanishes identically in 3D)" : "") << "\n";
    }
    art.write(a.csv_name, [&](std::ostream& f) { write_csv(f, to_data(core.scalar, "R")); });
    if (!a.ricci_name.empty())
      art.write(a.ricci_name, [&](std::ostream& f) { write_csv(f, to_data(core.ricci, "Ric")); });
  } else if (m.homogeneous) {
    const auto& h = *m.homogeneous;
    result = {{"scalar", h.scalar}, {"ricci_factor", h.scalar / h.n}, {"ricci_norm", std::abs(h.scalar) / std::sqrt(h.n)},
              {"traceless_ricci", 0.0}, {"volume", h.volume}};
    out << "scalar curvature " << fixed(h.scalar) << ", Ric = " << fixed(h.scalar / h.n) << " g, |Ric|_g "
        << fixed(result["ricci_norm"]) << ", Ric0 = 0\n";
    art.write(a.csv_name, [&](std::ostream& f) {
      f << "quantity,value\n";
      for (const auto& [k, v] : result.items()) f << k << "," << csv(v.get<double>()) << "\n";
    });
  } else {
    const auto& w = *m.warped;
    const auto curv = warped_curvature(w);
    const auto [lo, hi] = std::ranges::minmax(curv.scalar);
    result = {{"scalar_min", lo}, {"scalar_max", hi}};
    out << "scalar curvature: min " << fixed(lo) << ", max " << fixed(hi) << "\n";
    art.write(a.csv_name, [&](std::ostream& f) {
      f << "r,phi,radial_sectional,tangential_sectional,ricci_radial,ricci_tangential,scalar\n";
      for (std::size_t i = 0; i < w.size(); ++i)
        f << csv(w.r(i)) << "," << csv(w.phi()[i]) << "," << csv(curv.radial_sectional[i]) << ","
          << csv(curv.tangential_sectional[i]) << "," << csv(curv.ricci_radial[i]) << ","
          << csv(curv.ricci_tangential[i]) << "," << csv(curv.scalar[i]) << "\n";
    });
  }
  manifest.set_result(result);
  return 0;
}

// ------------------------------------------------------------------ gradient

struct GradientArgs {
  MetricSource source;
  std::string t = "0";
  std::string stencil = "order4";
  std::string csv_name = "gradient.csv";
  double require_critical = -1.0;
};

int cmd_gradient(const GradientArgs& a, const Common& c, Manifest& manifest, std::ostream& out) {
  const Stencil stencil = stencil_from_string(a.stencil);
  const FunctionalSpec spec = spec_from_string(a.t);
  manifest.parameters()["functional"] = to_string(spec);
  manifest.parameters()["stencil"] = to_string(stencil);
  const auto m = resolve(a.source, c, manifest);
  Artifacts art{c, manifest};
  describe(out, m, stencil);
  out << "functional: " << to_string(spec) << "\n";
  nlohmann::json result;
  double residual = 0.0;

  if (m.grid) {
    const auto terms = gradient_terms(*m.grid, stencil);
    const auto G = assemble_gradient(terms, *m.grid, spec);
    const double trace_res = trace_identity_residual(terms, *m.grid, spec).max_abs();
    residual = G.sup_norm;
    result = {{"value", G.value}, {"sup_norm", G.sup_norm}, {"l2_norm", G.l2_norm}, {"trace_identity_residual", trace_res}};
    out << "value " << fixed(G.value) << ", residual sup |G|_g " << fixed(G.sup_norm) << ", L2 " << fixed(G.l2_norm)
        << ", trace identity residual " << fixed(trace_res) << "\n";
    if (m.grid->dimension() == 3) {
      if (const auto* ft = std::get_if<FiniteT>(&spec)) {
        const auto D = dim3_gradient(terms, *m.grid, ft->t);
        double gap = 0.0;
        for (std::size_t i = 0; i < D.gradient.raw().size(); ++i)
          gap = std::max(gap, std::abs(D.gradient.raw()[i] - G.gradient.raw()[i]));
        result["dim3_assembly_gap"] = gap;
        out << "three-dimensional assembly gap " << fixed(gap) << "\n";
      }
    }
    art.write(a.csv_name, [&](std::ostream& f) { write_csv(f, to_data(G.gradient, "G")); });
  } else if (m.homogeneous) {
    const auto& h = *m.homogeneous;
    const double k = gradient_coefficient(h, spec);
    residual = std::abs(k) * std::sqrt(h.n);
    result = {{"coefficient", k}, {"sup_norm", residual}, {"value", functional_value(h, spec)}};
    out << "G = " << fixed(k, 17) << " g, residual sup |G|_g " << fixed(residual) << ", value "
        << fixed(result["value"]) << (std::isinf(h.volume) || h.scalar < 0 ? " (per unit volume)" : "") << "\n";
    art.write(a.csv_name, [&](std::ostream& f) {
      f << "quantity,value\n";
      for (const auto& [key, v] : result.items()) f << key << "," << csv(v.get<double>()) << "\n";
    });
  } else {
    const auto& w = *m.warped;
    const auto G = warped_gradient(w, spec);
    residual = G.sup_norm;
    result = {{"value", G.value}, {"sup_norm", G.sup_norm}};
    out << "value " << fixed(G.value) << ", residual sup |G|_g " << fixed(G.sup_norm) << "\n";
    art.write(a.csv_name, [&](std::ostream& f) {
      f << "r,radial,tangential,trace\n";
      for (std::size_t i = 0; i < w.size(); ++i)
        f << csv(w.r(i)) << "," << csv(G.radial[i]) << "," << csv(G.tangential[i]) << "," << csv(G.trace[i]) << "\n";
    });
  }
  manifest.set_result(result);
  if (a.require_critical >= 0.0) {
    const bool ok = residual <= a.require_critical;
    out << "critical within " << fixed(a.require_critical) << ": " << (ok ? "yes" : "NO") << "\n";
    return ok ? 0 : 1;
  }
  return 0;
}

// ----------------------------------------------------------------------- ode

struct OdeArgs {
  double f0 = 0.0;
  double fp0 = 0.0;
  double r_min = -100.0;
  double r_max = 100.0;
  std::string csv_name = "trajectory.csv";
  std::string svg_name;
};

std::string end_text(const DomainEnd& e) {
  std::string s = to_string(e.kind) + " at r = " + fixed(e.r, 10);
  if (e.kind == EndKind::BlowUp) s += " (blow-up extrapolated to " + fixed(e.extrapolated, 10) + ")";
  return s;
}

int cmd_ode(const OdeArgs& a, const Common& c, Manifest& manifest, std::ostream& out) {
  auto& p = manifest.parameters();
  p["f0"] = a.f0;
  p["fp0"] = a.fp0;
  p["r_min"] = a.r_min;
  p["r_max"] = a.r_max;
  OdeOptions opt;
  opt.r_min = a.r_min;
  opt.r_max = a.r_max;
  const auto sol = integrate_ode(a.f0, a.fp0, opt);
  const auto dom = maximal_domain(a.f0, a.fp0);
  const std::string inconsistency = family_inconsistency(sol);
  Artifacts art{c, manifest};

  out << "initial (f, f') = (" << a.f0 << ", " << a.fp0 << "), E = " << fixed(sol.energy, 12) << "\n"
      << "family: " << to_string(sol.family) << "\n"
      << "lower end: " << end_text(sol.lower) << "\n"
      << "upper end: " << end_text(sol.upper) << "\n"
      << "quadrature domain: (" << (dom.lower_finite ? fixed(dom.lower, 10) : "-inf") << ", "
      << (dom.upper_finite ? fixed(dom.upper, 10) : "+inf") << ")\n";
  nlohmann::json result = {{"family", to_string(sol.family)},
                           {"energy", sol.energy},
                           {"max_energy_drift", sol.max_energy_drift},
                           {"lower_end", sol.lower.extrapolated},
                           {"upper_end", sol.upper.extrapolated}};
  if (sol.critical) {
    out << "critical point: r = " << fixed(sol.critical->r, 12) << ", f_max = " << fixed(sol.critical->f, 12)
        << " ((6E)^(1/3) = " << fixed(std::cbrt(6.0 * sol.energy), 12) << ")\n";
    result["critical_r"] = sol.critical->r;
    result["f_max"] = sol.critical->f;
  }
  out << "energy drift " << fixed(sol.max_energy_drift) << "\n";
  if (!inconsistency.empty()) out << "family check FAILED: " << inconsistency << "\n";

  art.write(a.csv_name, [&](std::ostream& f) {
    f << "r,f,fp,energy\n";
    for (const auto& s : sol.samples) f << csv(s.r) << "," << csv(s.f) << "," << csv(s.fp) << "," << csv(energy(s)) << "\n";
  });
  if (!a.svg_name.empty()) art.write(a.svg_name, [&](std::ostream& f) { cli::write_phase_portrait(f, sol); });
  manifest.set_result(result);
  return inconsistency.empty() && sol.max_energy_drift < 1e-10 ? 0 : 1;
}

// ----------------------------------------------------------------- constants

struct ConstantsArgs {
  int n = 0;
  std::string range;
  std::string csv_name = "constants.csv";
};

int cmd_constants(const ConstantsArgs& a, const Common& c, Manifest& manifest, std::ostream& out) {
  int lo = a.n, hi = a.n;
  if (!a.range.empty()) {
    const auto colon = a.range.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      lo = std::stoi(a.range.substr(0, colon));
      hi = std::stoi(a.range.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigurationError("--n-range expects LO:HI, got '" + a.range + "'");
    }
  }
  if (lo > hi) throw ConfigurationError("--n-range is empty");
  manifest.parameters()["n_lo"] = lo;
  manifest.parameters()["n_hi"] = hi;

  std::vector<RigidityConstants> rows;
  std::vector<std::optional<double>> lambdas;
  for (int n = lo; n <= hi; ++n) {
    rows.push_back(compute_constants(n));
    const double mid = 0.5 * (rows.back().A_lo + rows.back().A_hi);
    lambdas.push_back(quadratic_negativity(n, mid).lambda);
  }
  bool ok = true;
  out << std::left << std::setw(4) << "n" << std::setw(10) << "a" << std::setw(10) << "b" << std::setw(10) << "c"
      << std::setw(14) << "delta2" << std::setw(12) << "C" << std::setw(12) << "q*" << "A interval\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& k = rows[i];
    ok = ok && k.delta2_agree && k.q_star > 2.0 && std::abs(k.q_star - k.q_star_closed) < 1e-12 &&
         lambdas[i].has_value() && *lambdas[i] > 0.0;
    out << std::setw(4) << k.n << std::setw(10) << k.a_exact << std::setw(10) << k.b_exact << std::setw(10)
        << k.c_exact << std::setw(14) << k.delta2_exact << std::setw(12) << fixed(k.C) << std::setw(12)
        << fixed(k.q_star) << "(" << fixed(k.A_lo) << ", " << fixed(k.A_hi) << ")"
        << (k.delta2_agree ? "" : "  discriminant routes DISAGREE") << "\n";
  }
  Artifacts art{c, manifest};
  art.write(a.csv_name, [&](std::ostream& f) {
    f << "n,a,b,c,delta2,delta2_agree,C,q_star,q_star_closed,A_lo,A_hi,lambda_mid\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& k = rows[i];
      f << k.n << "," << k.a_exact << "," << k.b_exact << "," << k.c_exact << "," << k.delta2_exact << ","
        << (k.delta2_agree ? "true" : "false") << "," << csv(k.C) << "," << csv(k.q_star) << ","
        << csv(k.q_star_closed) << "," << csv(k.A_lo) << "," << csv(k.A_hi) << ","
        << (lambdas[i] ? csv(*lambdas[i]) : "") << "\n";
    }
  });
  manifest.set_result({{"rows", rows.size()}, {"checks_pass", ok}});
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------- flow

struct FlowArgs {
  std::string config;
  std::string trace_name = "flow_trace.csv";
  std::string metric_name = "flow_metric.csv";
  std::string svg_name;
};

int cmd_flow(const FlowArgs& a, const Common& c, Manifest& manifest, std::ostream& out) {
  std::ifstream in(a.config);
  if (!in) throw ConfigurationError("cannot read config '" + a.config + "'");
  const auto job = cli::parse_flow_config(in, c.seed);
  manifest.add_input(a.config);
  manifest.parameters() = cli::to_json(job);

  cli::ResolvedMetric start;
  if (!job.file.empty()) {
    manifest.add_input(job.file);
    start = cli::load_metric_file(job.file);
  } else {
    start = cli::resolve_preset(job.preset, job.start);
  }
  if (start.homogeneous) throw ConfigurationError("closed-form presets cannot be flowed; use homogeneous_flow");
  const FlowFamily family = start.grid ? FlowFamily::FullGrid : FlowFamily::WarpedProfile;
  if (job.family && *job.family != family)
    throw ConfigurationError("flow config: family does not match the start metric '" + start.label + "'");
  describe(out, start, job.config.stencil);
  out << "functional " << to_string(job.config.spec) << ", target " << to_string(job.config.target) << " < "
      << job.config.residual_target << ", preconditioner " << to_string(job.config.preconditioner) << "\n";

  Artifacts art{c, manifest};
  FlowTrace trace;
  if (start.grid) {
    auto res = run_flow(*start.grid, job.config);
    trace = std::move(res.trace);
    art.write(a.metric_name, [&](std::ostream& f) { write_csv(f, to_data(res.metric)); });
  } else {
    auto res = warped_flow(*start.warped, job.config);
    trace = std::move(res.trace);
    art.write(a.metric_name, [&](std::ostream& f) {
      f << "r,phi\n";
      for (std::size_t i = 0; i < res.profile.size(); ++i) f << csv(res.profile.r(i)) << "," << csv(res.profile.phi()[i]) << "\n";
    });
  }
  art.write(a.trace_name, [&](std::ostream& f) {
    f << "step,value,grad_sup,grad_l2,ricci_sup,min_eigenvalue,scalar_min,scalar_max,step_size,halvings\n";
    for (const auto& r : trace.records)
      f << r.step << "," << csv(r.value) << "," << csv(r.grad_sup) << "," << csv(r.grad_l2) << "," << csv(r.ricci_sup)
        << "," << csv(r.min_eigenvalue) << "," << csv(r.scalar_min) << "," << csv(r.scalar_max) << ","
        << csv(r.step_size) << "," << r.halvings << "\n";
  });
  if (!a.svg_name.empty()) art.write(a.svg_name, [&](std::ostream& f) { cli::write_flow_trace(f, trace); });

  const auto& last = trace.records.back();
  const bool reached = trace.stop == FlowStop::ResidualReached;
  const bool mono = trace.monotone();
  out << "stopped: " << to_string(trace.stop) << " after " << last.step << " steps"
      << (trace.message.empty() ? "" : " (" + trace.message + ")") << "\n"
      << "value " << fixed(last.value) << ", gradient sup " << fixed(last.grad_sup) << ", |Ric| sup "
      << fixed(last.ricci_sup) << ", R in [" << fixed(last.scalar_min) << ", " << fixed(last.scalar_max) << "]\n"
      << "monotone: " << (mono ? "yes" : "NO") << "\n";
  manifest.set_result({{"stop", to_string(trace.stop)},
                       {"steps", last.step},
                       {"value", last.value},
                       {"grad_sup", last.grad_sup},
                       {"ricci_sup", last.ricci_sup},
                       {"monotone", mono}});
  return reached && mono ? 0 : 1;
}

// -------------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<int> only;
};

int cmd_verify(const VerifyArgs& a, const Common& c, Manifest& manifest, std::ostream& out) {
  AcceptanceOptions opt;
  opt.seed = c.seed;
  opt.only = a.only;
  opt.on_result = [&](const CriterionResult& r) { out << format_result(r) << std::endl; };
  manifest.parameters()["only"] = a.only;
  const auto results = run_acceptance(opt);
  int passed = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    rows.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
  }
  out << passed << "/" << results.size() << " criteria passed\n";
  manifest.set_result(rows);
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"curvature-lab: quadratic curvature functionals, conformal ODE, rigidity constants and descent flows"};
  app.require_subcommand(1);
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "List the built-in metrics and exit");

  Common common;
  std::function<int(Manifest&)> action;
  std::string command;

  CurvatureArgs curv;
  auto* sc = app.add_subcommand("curvature", "Curvature report of a metric");
  add_metric_source(sc, curv.source);
  sc->add_option("--stencil", curv.stencil, "order2|order4|order6|order8|spectral")->capture_default_str();
  sc->add_option("--csv", curv.csv_name, "Curvature output")->capture_default_str();
  sc->add_option("--ricci", curv.ricci_name, "Also write the Ricci tensor field (grid metrics)");
  add_common(sc, common);
  sc->callback([&] {
    command = "curvature";
    action = [&](Manifest& m) { return cmd_curvature(curv, common, m, out); };
  });

  GradientArgs grad;
  auto* sg = app.add_subcommand("gradient", "Euler-Lagrange gradient and residual");
  add_metric_source(sg, grad.source);
  sg->add_option("--t", grad.t, "Functional: t value (e.g. 0, -1/3, 0.5) or 'sigma'")->capture_default_str();
  sg->add_option("--stencil", grad.stencil, "order2|order4|order6|order8|spectral")->capture_default_str();
  sg->add_option("--csv", grad.csv_name, "Gradient output")->capture_default_str();
  sg->add_option("--require-critical", grad.require_critical, "Exit 1 unless the residual is at most this value");
  add_common(sg, common);
  sg->callback([&] {
    command = "gradient";
    action = [&](Manifest& m) { return cmd_gradient(grad, common, m, out); };
  });

  OdeArgs ode;
  auto* so = app.add_subcommand("ode", "Integrate f'' = -f^2/4 and classify the solution");
  so->add_option("--f0", ode.f0, "f(0)")->required();
  so->add_option("--fp0", ode.fp0, "f'(0)")->required();
  so->add_option("--r-min", ode.r_min, "Lower integration limit")->capture_default_str();
  so->add_option("--r-max", ode.r_max, "Upper integration limit")->capture_default_str();
  so->add_option("--csv", ode.csv_name, "Trajectory output")->capture_default_str();
  so->add_option("--svg", ode.svg_name, "Phase portrait output");
  add_common(so, common);
  so->callback([&] {
    command = "ode";
    action = [&](Manifest& m) { return cmd_ode(ode, common, m, out); };
  });

  ConstantsArgs cons;
  auto* sk = app.add_subcommand("constants", "Rigidity constants table");
  auto* on = sk->add_option("--n", cons.n, "Single dimension (n >= 5)");
  auto* orange = sk->add_option("--n-range", cons.range, "Dimensions LO:HI");
  on->excludes(orange);
  sk->add_option("--csv", cons.csv_name, "Table output")->capture_default_str();
  add_common(sk, common);
  sk->callback([&] {
    command = "constants";
    if (cons.n == 0 && cons.range.empty()) throw CLI::ValidationError("constants", "give --n or --n-range");
    action = [&](Manifest& m) { return cmd_constants(cons, common, m, out); };
  });

  FlowArgs flow;
  auto* sf = app.add_subcommand("flow", "Gradient descent flow from an INI config");
  sf->add_option("--config", flow.config, "Flow config file")->required()->check(CLI::ExistingFile);
  sf->add_option("--trace", flow.trace_name, "Trace output")->capture_default_str();
  sf->add_option("--metric-out", flow.metric_name, "Terminal metric or profile output")->capture_default_str();
  sf->add_option("--svg", flow.svg_name, "Trace plot output");
  add_common(sf, common);
  sf->callback([&] {
    command = "flow";
    action = [&](Manifest& m) { return cmd_flow(flow, common, m, out); };
  });

  VerifyArgs ver;
  auto* sv = app.add_subcommand("verify", "Run the acceptance suite");
  sv->add_option("--only", ver.only, "Criterion ids to run (default: all)")->check(CLI::Range(1, kCriterionCount));
  add_common(sv, common);
  sv->callback([&] {
    command = "verify";
    action = [&](Manifest& m) { return cmd_verify(ver, common, m, out); };
  });

  std::vector<std::string> storage{"curvature-lab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  // --list-presets works without a subcommand
  if (std::ranges::find(args, std::string("--list-presets")) != args.end()) {
    out << cli::preset_help();
    return 0;
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Manifest manifest(command, args);
  manifest.set_seed(common.seed);
  int code = 1;
  try {
    code = action(manifest);
  } catch (const ConfigurationError& e) {
    err << command << ": " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << command << ": error: " << e.what() << "\n";
    code = 1;
  }
  if (!common.no_manifest) {
    manifest.set_exit_code(code);
    try {
      fs::create_directories(common.out_dir);
      manifest.write(fs::path(common.out_dir) / common.manifest);
    } catch (const std::exception& e) {
      err << command << ": cannot write manifest: " << e.what() << "\n";
      return 1;
    }
  }
  return code;
}

}  // namespace curvlab
