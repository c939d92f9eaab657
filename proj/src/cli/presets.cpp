#include "presets.hpp"

#include <cmath>
#include <numbers>

#include "curvlab/conformal_ode.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/field_io.hpp"
#include "curvlab/samples.hpp"

namespace curvlab::cli {

namespace {

struct Preset {
  const char* name;
  const char* description;
};

constexpr Preset kPresets[] = {
    {"flat2", "flat 2-torus on an 8^2 grid"},
    {"flat3", "flat 3-torus on an 8^3 grid"},
    {"flat4", "flat 4-torus on an 8^4 grid"},
    {"flat5", "flat 5-torus on an 8^5 grid"},
    {"sphere3", "unit round 3-sphere (closed form)"},
    {"hyperbolic4", "hyperbolic 4-space, sectional curvature -1 (closed form)"},
    {"hyperbolic5", "hyperbolic 5-space, sectional curvature -1 (closed form)"},
    {"random3", "random smooth 3D metric, 16^3 grid, amplitude 0.1, from --seed"},
    {"random4", "random smooth 4D metric, 10^4 grid, amplitude 0.1, from --seed"},
    {"perturbed-flat3", "flat 3-torus plus a random perturbation of amplitude 0.01, 24^3 grid"},
    {"warped-family1", "surface of the bounded-above family, f(0) = 0, f'(0) = 1, increasing side"},
    {"warped-family2", "separatrix surface, f(0) = -6, f'(0) = -6, on [-6, 0]"},
    {"warped-family3", "separatrix surface, f(0) = -6, f'(0) = 6, on [0, 6]"},
    {"warped-sine3", "periodic warped 3-manifold, phi = 1 + 0.05 sin r, 48 samples"},
};

ResolvedMetric from_grid(std::string label, MetricField g) {
  ResolvedMetric m;
  m.label = std::move(label);
  m.grid = std::move(g);
  return m;
}

ResolvedMetric from_surface(std::string label, const OdeSolution& sol, double a, double b) {
  ResolvedMetric m;
  m.label = std::move(label);
  m.warped = reconstruct_surface(sol, a, b).surface;
  return m;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::string preset_help() {
  std::string s;
  for (const auto& p : kPresets) s += std::string("  ") + p.name + ": " + p.description + "\n";
  return s;
}

ResolvedMetric resolve_preset(const std::string& name, const PresetOptions& opt) {
  auto points = [&](int fallback) { return opt.points > 0 ? opt.points : fallback; };
  auto amplitude = [&](double fallback) { return opt.amplitude > 0.0 ? opt.amplitude : fallback; };

  if (name.size() == 5 && name.starts_with("flat") && name[4] >= '2' && name[4] <= '5')
    return from_grid(name, MetricField::identity(Grid::cube(name[4] - '0', points(8))));
  if (name == "sphere3") {
    ResolvedMetric m;
    m.label = name;
    m.homogeneous = HomogeneousEinstein::unit_sphere(3);
    return m;
  }
  if (name == "hyperbolic4" || name == "hyperbolic5") {
    ResolvedMetric m;
    m.label = name;
    m.homogeneous = HomogeneousEinstein::hyperbolic(name.back() - '0');
    return m;
  }
  if (name == "random3") return from_grid(name, random_smooth_metric(Grid::cube(3, points(16)), opt.seed, amplitude(0.1)));
  if (name == "random4") return from_grid(name, random_smooth_metric(Grid::cube(4, points(10)), opt.seed, amplitude(0.1)));
  if (name == "perturbed-flat3")
    return from_grid(name, random_smooth_metric(Grid::cube(3, points(24)), opt.seed, amplitude(0.01)));
  if (name == "warped-family1") {
    const auto sol = integrate_ode(0.0, 1.0);
    const double rc = sol.critical->r;
    return from_surface(name, sol, rc - 2.0, rc - 0.3);
  }
  if (name == "warped-family2") return from_surface(name, integrate_ode(-6.0, -6.0), -6.0, 0.0);
  if (name == "warped-family3") return from_surface(name, integrate_ode(-6.0, 6.0), 0.0, 6.0);
  if (name == "warped-sine3") {
    const int N = points(48);
    const double amp = amplitude(0.05);
    std::vector<double> phi;
    for (int i = 0; i < N; ++i) phi.push_back(1.0 + amp * std::sin(2.0 * std::numbers::pi * i / N));
    WarpedProductMetric::Options o;
    o.periodic = true;
    ResolvedMetric m;
    m.label = name;
    m.warped = WarpedProductMetric(3, 0.0, 2.0 * std::numbers::pi, std::move(phi), o);
    return m;
  }
  throw ConfigurationError("unknown preset '" + name + "'; available:\n" + preset_help());
}

ResolvedMetric load_metric_file(const std::string& path) {
  return from_grid(path, metric_from(load_field(path)));
}

}  // namespace curvlab::cli
