#include "curvlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <fftw3.h>

#include "curvlab/errors.hpp"

namespace curvlab {

std::string to_string(FlowTarget t) {
  switch (t) {
    case FlowTarget::GradientSup: return "gradient";
    case FlowTarget::RicciSup: return "ricci";
    case FlowTarget::ScalarSup: return "scalar";
  }
  return "?";
}

FlowTarget flow_target_from_string(const std::string& s) {
  if (s == "gradient") return FlowTarget::GradientSup;
  if (s == "ricci") return FlowTarget::RicciSup;
  if (s == "scalar") return FlowTarget::ScalarSup;
  throw ConfigurationError("unknown flow target '" + s + "' (gradient, ricci, scalar)");
}

std::string to_string(Preconditioner p) { return p == Preconditioner::None ? "none" : "bilaplacian"; }

Preconditioner preconditioner_from_string(const std::string& s) {
  if (s == "none") return Preconditioner::None;
  if (s == "bilaplacian") return Preconditioner::Bilaplacian;
  throw ConfigurationError("unknown preconditioner '" + s + "' (none, bilaplacian)");
}

std::string to_string(FlowStop s) {
  switch (s) {
    case FlowStop::ResidualReached: return "residual_reached";
    case FlowStop::MaxSteps: return "max_steps";
    case FlowStop::Degenerate: return "degenerate";
    case FlowStop::NonFinite: return "non_finite";
    case FlowStop::LineSearchFailed: return "line_search_failed";
  }
  return "?";
}

void FlowConfig::validate() const {
  if (!(step > 0.0)) throw ConfigurationError("flow step must be positive");
  if (!(residual_target > 0.0)) throw ConfigurationError("residual target must be positive");
  if (max_steps < 0) throw ConfigurationError("max_steps must be nonnegative");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigurationError("Armijo constant must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigurationError("backtracking factor must lie in (0, 1)");
  if (!(growth >= 1.0)) throw ConfigurationError("step growth must be >= 1");
  if (!(max_step >= step)) throw ConfigurationError("max_step must be >= step");
  if (max_halvings < 0) throw ConfigurationError("max_halvings must be nonnegative");
}

bool FlowTrace::monotone() const {
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].value > records[i - 1].value) return false;
  return true;
}

// ------------------------------------------------------------ preconditioner

namespace {

// In-place multiplier on one periodic array; `lengths` per axis, row-major.
void apply_multiplier(std::span<double> data, const std::vector<int>& dims, const std::vector<double>& lengths) {
  const std::size_t N = data.size();
  auto* buf = fftw_alloc_complex(N);
  for (std::size_t p = 0; p < N; ++p) {
    buf[p][0] = data[p];
    buf[p][1] = 0.0;
  }
  const int rank = static_cast<int>(dims.size());
  const fftw_plan fwd = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  const fftw_plan bwd = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  for (std::size_t p = 0; p < N; ++p) {
    double k2 = 0.0;
    std::size_t rest = p;
    for (int a = rank - 1; a >= 0; --a) {
      const int m = dims[static_cast<std::size_t>(a)];
      const int idx = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
      const int wave = idx <= m / 2 ? idx : idx - m;
      const double k = 2.0 * std::numbers::pi * wave / lengths[static_cast<std::size_t>(a)];
      k2 += k * k;
    }
    const double s = 1.0 / ((1.0 + k2) * (1.0 + k2) * static_cast<double>(N));
    buf[p][0] *= s;
    buf[p][1] *= s;
  }
  fftw_execute(bwd);
  for (std::size_t p = 0; p < N; ++p) data[p] = buf[p][0];
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);
}

}  // namespace

TensorField2 precondition(const TensorField2& T) {
  const auto& grid = T.grid();
  const int n = grid.dimension();
  std::vector<int> dims(static_cast<std::size_t>(n), grid.points());
  std::vector<double> lengths;
  for (int a = 0; a < n; ++a) lengths.push_back(grid.length(a));
  TensorField2 out = T;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) apply_multiplier(out.component(i, j), dims, lengths);
  return out;
}

std::vector<double> precondition_periodic(const std::vector<double>& v, double length) {
  std::vector<double> out = v;
  apply_multiplier(out, {static_cast<int>(v.size())}, {length});
  return out;
}

// ------------------------------------------------------------ full grid

namespace {

TensorField2 axpy(const MetricField& g, double eta, const TensorField2& d) {
  TensorField2 out = g.components();
  auto raw = out.raw();
  const auto dr = d.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += eta * dr[i];
  return out;
}

FlowRecord record_of(int step, const GradientTerms& terms, const GradientReport& G, const MetricField& g) {
  FlowRecord r;
  r.step = step;
  r.value = G.value;
  r.grad_sup = G.sup_norm;
  r.grad_l2 = G.l2_norm;
  double ric = 0.0;
  for (double v : terms.core.ricci_norm2.values()) ric = std::max(ric, v);
  r.ricci_sup = std::sqrt(ric);
  r.min_eigenvalue = g.min_eigenvalue();
  r.scalar_min = terms.core.scalar.min();
  r.scalar_max = terms.core.scalar.max();
  return r;
}

double target_value(const FlowRecord& r, FlowTarget t) {
  switch (t) {
    case FlowTarget::GradientSup: return r.grad_sup;
    case FlowTarget::RicciSup: return r.ricci_sup;
    case FlowTarget::ScalarSup: return std::max(std::abs(r.scalar_min), std::abs(r.scalar_max));
  }
  return 0.0;
}

bool finite(const FlowRecord& r) {
  return std::isfinite(r.value) && std::isfinite(r.grad_sup) && std::isfinite(r.ricci_sup) &&
         std::isfinite(r.scalar_min) && std::isfinite(r.scalar_max);
}

}  // namespace

FlowStepResult flow_step(const MetricField& g, const FunctionalSpec& spec, double eta, Stencil stencil,
                         int max_halvings) {
  const auto G = gradient(g, spec, stencil);
  TensorField2 d = G.gradient;
  for (double& v : d.raw()) v = -v;
  for (int h = 0; h <= max_halvings; ++h) {
    try {
      return FlowStepResult{MetricField(axpy(g, eta, d)), eta, h};
    } catch (const DegenerateMetricError&) {
      eta *= 0.5;
    }
  }
  throw DegenerateMetricError("flow step rejected after " + std::to_string(max_halvings) + " halvings", 0);
}

FlowResult run_flow(const MetricField& g0, const FlowConfig& cfg) {
  cfg.validate();
  FlowResult out{FlowTrace{}, g0};
  auto& trace = out.trace;
  double eta = cfg.step;

  for (int step = 0;; ++step) {
    const MetricField& g = out.metric;
    const auto terms = gradient_terms(g, cfg.stencil);
    const auto G = assemble_gradient(terms, g, cfg.spec);
    FlowRecord rec = record_of(step, terms, G, g);
    if (!finite(rec)) {
      trace.stop = FlowStop::NonFinite;
      trace.message = "non-finite curvature or gradient at step " + std::to_string(step);
      return out;
    }
    trace.records.push_back(rec);
    if (target_value(rec, cfg.target) < cfg.residual_target) {
      trace.stop = FlowStop::ResidualReached;
      return out;
    }
    if (step >= cfg.max_steps) {
      trace.stop = FlowStop::MaxSteps;
      return out;
    }
    if (rec.min_eigenvalue < cfg.min_eigenvalue) {
      trace.stop = FlowStop::Degenerate;
      trace.message = "metric eigenvalue below the guard";
      return out;
    }

    TensorField2 d = cfg.preconditioner == Preconditioner::Bilaplacian ? precondition(G.gradient) : G.gradient;
    for (double& v : d.raw()) v = -v;
    double slope = l2_pairing(G.gradient, d, terms.core);
    if (!(slope < 0.0)) {
      d = G.gradient;
      for (double& v : d.raw()) v = -v;
      slope = -G.l2_norm * G.l2_norm;
    }

    bool accepted = false, any_admissible = false;
    for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, eta *= cfg.backtrack) {
      std::optional<MetricField> trial;
      try {
        trial.emplace(axpy(g, eta, d));
      } catch (const DegenerateMetricError&) {
        continue;
      } catch (const NonFiniteError&) {
        trace.stop = FlowStop::NonFinite;
        trace.message = "non-finite trial metric at step " + std::to_string(step);
        return out;
      }
      any_admissible = true;
      if (cfg.line_search) {
        const double F = functional_value(*trial, cfg.spec, cfg.stencil);
        if (!std::isfinite(F)) continue;
        if (F > rec.value + cfg.armijo * eta * slope) continue;
      }
      trace.records.back().step_size = eta;
      trace.records.back().halvings = halvings;
      out.metric = std::move(*trial);
      accepted = true;
      break;
    }
    if (!accepted) {
      trace.stop = any_admissible ? FlowStop::LineSearchFailed : FlowStop::Degenerate;
      trace.message = "no acceptable step after " + std::to_string(cfg.max_halvings) + " halvings";
      return out;
    }
    if (cfg.line_search) eta = std::min(eta * cfg.growth, cfg.max_step);
  }
}

// ------------------------------------------------------------ warped profiles

namespace {

FlowRecord warped_record(int step, const WarpedProductMetric& w, const WarpedGradient& G) {
  const auto curv = warped_curvature(w);
  const double n1 = w.dimension() - 1;
  FlowRecord r;
  r.step = step;
  r.value = G.value;
  r.grad_sup = G.sup_norm;
  std::vector<double> g2(w.size()), ric(w.size());
  double ric_sup = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    g2[i] = G.radial[i] * G.radial[i] + n1 * G.tangential[i] * G.tangential[i];
    const double A = curv.ricci_radial[i], B = curv.ricci_tangential[i];
    ric_sup = std::max(ric_sup, std::sqrt(A * A + n1 * B * B));
  }
  r.grad_l2 = std::sqrt(std::max(0.0, w.integrate(g2)));
  r.ricci_sup = ric_sup;
  const auto [lo, hi] = std::ranges::minmax(curv.scalar);
  r.scalar_min = lo;
  r.scalar_max = hi;
  const double phi_min = std::ranges::min(w.phi());
  r.min_eigenvalue = std::min(1.0, phi_min * phi_min);
  return r;
}

}  // namespace

WarpedFlowResult warped_flow(const WarpedProductMetric& w0, const FlowConfig& cfg) {
  cfg.validate();
  if (cfg.preconditioner == Preconditioner::Bilaplacian && !w0.periodic())
    throw ConfigurationError("the bilaplacian preconditioner needs a periodic profile");
  if (!(std::ranges::min(w0.phi()) > 0.0)) throw PreconditionError("warped flow needs phi > 0");

  WarpedFlowResult out{FlowTrace{}, w0};
  auto& trace = out.trace;
  double eta = cfg.step;
  const double h = w0.spacing();
  const double length = w0.r_hi() - w0.r_lo();

  for (int step = 0;; ++step) {
    const auto& w = out.profile;
    const auto G = warped_gradient(w, cfg.spec);
    FlowRecord rec = warped_record(step, w, G);
    if (!finite(rec)) {
      trace.stop = FlowStop::NonFinite;
      trace.message = "non-finite curvature or gradient at step " + std::to_string(step);
      return out;
    }
    trace.records.push_back(rec);
    if (target_value(rec, cfg.target) < cfg.residual_target) {
      trace.stop = FlowStop::ResidualReached;
      return out;
    }
    if (step >= cfg.max_steps) {
      trace.stop = FlowStop::MaxSteps;
      return out;
    }

    const auto D = profile_gradient_density(w, G);
    std::vector<double> d = cfg.preconditioner == Preconditioner::Bilaplacian ? precondition_periodic(D, length) : D;
    for (double& v : d) v = -v;
    std::vector<double> prod(D.size());
    for (std::size_t i = 0; i < D.size(); ++i) prod[i] = D[i] * d[i];
    const double slope = profile_integral(prod, h, w.periodic());

    bool accepted = false, any_admissible = false;
    for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, eta *= cfg.backtrack) {
      std::vector<double> phi = w.phi();
      for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += eta * d[i];
      if (!(std::ranges::min(phi) > cfg.min_profile)) continue;
      any_admissible = true;
      auto trial = w.with_profile(std::move(phi));
      if (cfg.line_search) {
        const double F = functional_value(trial, cfg.spec);
        if (!std::isfinite(F) || F > rec.value + cfg.armijo * eta * slope) continue;
      }
      trace.records.back().step_size = eta;
      trace.records.back().halvings = halvings;
      out.profile = std::move(trial);
      accepted = true;
      break;
    }
    if (!accepted) {
      trace.stop = any_admissible ? FlowStop::LineSearchFailed : FlowStop::Degenerate;
      trace.message = "profile step rejected after " + std::to_string(cfg.max_halvings) + " halvings";
      return out;
    }
    if (cfg.line_search) eta = std::min(eta * cfg.growth, cfg.max_step);
  }
}

// ------------------------------------------------------------ homogeneous path

std::vector<double> homogeneous_flow(const HomogeneousEinstein& unit, const FunctionalSpec& spec, double scale0,
                                     double eta, int steps) {
  if (!(scale0 > 0.0)) throw PreconditionError("homogeneous flow needs a positive scale");
  std::vector<double> s{scale0};
  for (int k = 0; k < steps; ++k) {
    const double kappa = gradient_coefficient(unit.scaled(std::sqrt(s.back())), spec);
    const double next = s.back() * (1.0 - eta * kappa);
    if (!(next > 0.0)) throw DegenerateMetricError("homogeneous flow left the positive scales", 0);
    s.push_back(next);
  }
  return s;
}

}  // namespace curvlab
