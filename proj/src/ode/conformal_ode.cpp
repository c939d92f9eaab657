#include "curvlab/conformal_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "curvlab/errors.hpp"

namespace curvlab {

double energy(double f, double fp) { return fp * fp + f * f * f / 6.0; }
double energy(const OdeState& s) { return energy(s.f, s.fp); }

std::string to_string(Family family) {
  switch (family) {
    case Family::Trivial: return "trivial";
    case Family::FamilyOne: return "family-one";
    case Family::FamilyTwo: return "family-two";
    case Family::FamilyThree: return "family-three";
  }
  return "?";
}

std::string to_string(EndKind kind) {
  switch (kind) {
    case EndKind::BlowUp: return "blow-up";
    case EndKind::SpanLimit: return "span-limit";
    case EndKind::StepUnderflow: return "step-underflow";
  }
  return "?";
}

double separatrix_tolerance(double f0) { return 1e-9 * std::max(1.0, std::abs(f0 * f0 * f0)); }

namespace {

using Vec = std::array<double, 2>;

Vec rhs(const Vec& y) { return {y[1], -0.25 * y[0] * y[0]}; }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  Vec y;
  double err;  // scaled error norm
};

StepResult dp_step(const Vec& y, double h, const OdeOptions& opt) {
  auto comb = [&](std::initializer_list<std::pair<double, const Vec*>> terms) {
    Vec out = y;
    for (const auto& [c, k] : terms)
      for (int i = 0; i < 2; ++i) out[static_cast<std::size_t>(i)] += h * c * (*k)[static_cast<std::size_t>(i)];
    return out;
  };
  const Vec k1 = rhs(y);
  const Vec k2 = rhs(comb({{a21, &k1}}));
  const Vec k3 = rhs(comb({{a31, &k1}, {a32, &k2}}));
  const Vec k4 = rhs(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vec k5 = rhs(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vec k6 = rhs(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const Vec y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const Vec k7 = rhs(y5);
  double err = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
    err = std::max(err, std::abs(e) / sc);
  }
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  return {y5, err};
}

enum class MarchStatus { Reached, BlowUp, Underflow };

// Adaptive integration from r to `target`, carrying the step size `h`
// (signed by direction). `on_accept(r, y, y_prev, h_used)` sees every step.
template <class OnAccept>
MarchStatus march(double& r, Vec& y, double target, double& h, const OdeOptions& opt, std::size_t& steps,
                  OnAccept&& on_accept) {
  const double dir = target >= r ? 1.0 : -1.0;
  if (h == 0.0 || (h > 0) != (dir > 0)) h = dir * std::abs(h == 0.0 ? opt.initial_step : h);
  while ((target - r) * dir > 0.0) {
    if (steps++ >= opt.max_steps) return MarchStatus::Underflow;
    const double remaining = target - r;
    const bool last = std::abs(h) >= std::abs(remaining);
    const double hs = last ? remaining : h;
    const auto [y5, err] = dp_step(y, hs, opt);
    if (err <= 1.0) {
      const Vec prev = y;
      const double r_prev = r;
      y = y5;
      r = last ? target : r + hs;
      on_accept(r_prev, prev, hs);
      if (std::abs(y[0]) > opt.blow_up_cap) return MarchStatus::BlowUp;
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      if (!last) h = hs * grow;
    } else {
      const double shrink = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h = hs * shrink;
    }
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(r))) return MarchStatus::Underflow;
  }
  return MarchStatus::Reached;
}

// Zero of f' inside the accepted step starting at (r, y) of length h, by
// bisection on re-taken partial steps.
OdeState locate_critical(double r, const Vec& y, double h, const OdeOptions& opt) {
  double lo = 0.0, hi = 1.0;
  const double s0 = y[1];
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec ym = dp_step(y, mid * h, opt).y;
    if ((ym[1] > 0) == (s0 > 0) && ym[1] != 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double th = 0.5 * (lo + hi);
  const Vec yc = dp_step(y, th * h, opt).y;
  return {r + th * h, yc[0], yc[1]};
}

DomainEnd side_end(MarchStatus st, double r, const Vec& y, double dir) {
  DomainEnd e;
  e.r = r;
  e.extrapolated = r;
  if (st == MarchStatus::BlowUp) {
    e.kind = EndKind::BlowUp;
    e.extrapolated = r + dir * std::sqrt(24.0 / std::abs(y[0]));
  } else if (st == MarchStatus::Underflow) {
    e.kind = EndKind::StepUnderflow;
  } else {
    e.kind = EndKind::SpanLimit;
  }
  return e;
}

}  // namespace

OdeSolution integrate_ode(double f0, double fp0, const OdeOptions& opt) {
  if (!std::isfinite(f0) || !std::isfinite(fp0)) throw PreconditionError("initial data must be finite");
  if (!(opt.r_min <= opt.r0 && opt.r0 <= opt.r_max)) throw ConfigurationError("r0 must lie in [r_min, r_max]");
  if (!(opt.rtol > 0 && opt.atol > 0 && opt.blow_up_cap > 0)) throw ConfigurationError("tolerances must be positive");

  OdeSolution sol;
  sol.initial = {opt.r0, f0, fp0};
  sol.energy = energy(f0, fp0);

  std::vector<OdeState> back, fwd;
  std::size_t steps = 0;
  for (double dir : {-1.0, 1.0}) {
    auto& out = dir < 0 ? back : fwd;
    double r = opt.r0;
    Vec y{f0, fp0};
    double h = dir * opt.initial_step;
    const auto status = march(r, y, dir < 0 ? opt.r_min : opt.r_max, h, opt, steps,
                              [&](double r_prev, const Vec& prev, double hs) {
                                if (!sol.critical && prev[1] != 0.0 && (prev[1] > 0) != (y[1] > 0))
                                  sol.critical = locate_critical(r_prev, prev, hs, opt);
                                out.push_back({r, y[0], y[1]});
                              });
    (dir < 0 ? sol.lower : sol.upper) = side_end(status, r, y, dir);
  }
  if (fp0 == 0.0 && f0 != 0.0) sol.critical = sol.initial;

  sol.samples.reserve(back.size() + fwd.size() + 1);
  sol.samples.assign(back.rbegin(), back.rend());
  sol.samples.push_back(sol.initial);
  sol.samples.insert(sol.samples.end(), fwd.begin(), fwd.end());
  for (const auto& s : sol.samples) {
    const double scale = std::max({1.0, s.fp * s.fp, std::abs(s.f * s.f * s.f) / 6.0});
    sol.max_energy_drift = std::max(sol.max_energy_drift, std::abs(energy(s) - sol.energy) / scale);
  }
  sol.family = classify_family(sol);
  return sol;
}

Family classify_family(const OdeSolution& sol) {
  const auto& s = sol.initial;
  if (s.f == 0.0 && s.fp == 0.0) return Family::Trivial;
  // Every level set E != 0 crosses f' = 0 exactly once; E = 0 splits into
  // the two branches f' = -+sqrt(-f^3/6) on either side of the origin.
  if (std::abs(sol.energy) < separatrix_tolerance(s.f) && s.fp != 0.0)
    return s.fp < 0 ? Family::FamilyTwo : Family::FamilyThree;
  return Family::FamilyOne;
}

std::string family_inconsistency(const OdeSolution& sol) {
  const auto& S = sol.samples;
  for (std::size_t i = 1; i < S.size(); ++i) {
    if (S[i].fp > S[i - 1].fp) return "f' increases at r = " + std::to_string(S[i].r);
    if (S[i].fp == S[i - 1].fp && S[i].f != 0.0 && S[i].r != S[i - 1].r)
      return "f' stalls at r = " + std::to_string(S[i].r);
  }
  switch (sol.family) {
    case Family::Trivial:
      for (const auto& s : S)
        if (s.f != 0.0 || s.fp != 0.0) return "trivial solution left the origin";
      return {};
    case Family::FamilyOne: {
      if (sol.lower.kind != EndKind::BlowUp || sol.upper.kind != EndKind::BlowUp)
        return "family one must blow up on both sides";
      if (!sol.critical) return "family one has no critical point";
      if (sol.critical->f == 0.0) return "family one maximum is zero";
      for (const auto& s : S)
        if (s.f > sol.critical->f + 1e-9 * std::max(1.0, std::abs(sol.critical->f)))
          return "f exceeds its critical value at r = " + std::to_string(s.r);
      if (!(S.front().fp > 0 && S.back().fp < 0)) return "f' does not change sign";
      return {};
    }
    case Family::FamilyTwo:
    case Family::FamilyThree: {
      const bool two = sol.family == Family::FamilyTwo;
      for (const auto& s : S) {
        if (!(s.f < 0)) return "separatrix solution is not strictly negative at r = " + std::to_string(s.r);
        if (two ? !(s.fp < 0) : !(s.fp > 0)) return "separatrix solution has a critical point";
      }
      const DomainEnd& blow = two ? sol.upper : sol.lower;
      const DomainEnd& open = two ? sol.lower : sol.upper;
      if (blow.kind != EndKind::BlowUp) return "separatrix solution does not blow up on its finite side";
      if (open.kind != EndKind::SpanLimit) return "separatrix solution stopped before the span on its open side";
      // decay toward the unbounded side: |f| and |f'| shrink monotonically
      const OdeState& far = two ? S.front() : S.back();
      if (!(std::abs(far.f) < std::abs(sol.initial.f) && std::abs(far.fp) < std::abs(sol.initial.fp)))
        return "separatrix solution does not decay toward the unbounded side";
      return {};
    }
  }
  return {};
}

namespace {

// Time to run from f = f_t - s^2 to the turning value f_t, after the
// substitution f = f_t - s^2 that removes the square-root singularity.
double domain_integrand(double s, double ft) {
  return 2.0 * std::sqrt(6.0) / std::sqrt(3.0 * ft * ft - 3.0 * ft * s * s + s * s * s * s);
}

}  // namespace

DomainEstimate maximal_domain(double f0, double fp0, double r0) {
  if (!std::isfinite(f0) || !std::isfinite(fp0)) throw PreconditionError("initial data must be finite");
  DomainEstimate d;
  const double inf = std::numeric_limits<double>::infinity();
  if (f0 == 0.0 && fp0 == 0.0) {
    d.lower = -inf;
    d.upper = inf;
    d.lower_finite = d.upper_finite = false;
    return d;
  }
  const double E = energy(f0, fp0);
  const bool separatrix = std::abs(E) < separatrix_tolerance(f0) && fp0 != 0.0;
  const double ft = separatrix ? 0.0 : std::cbrt(6.0 * E);
  d.turning = ft;
  const double s0 = std::sqrt(std::max(0.0, ft - f0));
  auto k = [ft](double s) { return domain_integrand(s, ft); };

  boost::math::quadrature::exp_sinh<double> tail_rule;
  double err = 0.0;
  double l1 = 0.0;
  // From f0 down to -infinity.
  const double tail = tail_rule.integrate(k, s0, inf, 1e-13, &err, &l1);
  d.error_estimate += err;
  if (separatrix) {
    if (fp0 < 0) {
      d.upper = r0 + tail;
      d.lower = -inf;
      d.lower_finite = false;
    } else {
      d.lower = r0 - tail;
      d.upper = inf;
      d.upper_finite = false;
    }
    return d;
  }
  // From f0 up to the turning value, then a full branch down to -infinity.
  double climb = 0.0;
  if (s0 > 0.0) {
    boost::math::quadrature::tanh_sinh<double> rule;
    climb = rule.integrate(k, 0.0, s0, 1e-13, &err, &l1);
    d.error_estimate += err;
  }
  const double branch = climb + tail;
  if (fp0 > 0) {
    d.upper = r0 + climb + branch;
    d.lower = r0 - tail;
  } else if (fp0 < 0) {
    d.upper = r0 + tail;
    d.lower = r0 - climb - branch;
  } else {
    d.upper = r0 + branch;
    d.lower = r0 - branch;
  }
  return d;
}

std::vector<OdeState> sample_uniform(const OdeState& start, double a, double b, int count, const OdeOptions& options) {
  if (count < 2 || !(a < b)) throw ConfigurationError("uniform sampling needs a < b and at least 2 points");
  // Adaptive march to the first node, then equal substeps between nodes:
  // a fixed step sequence keeps the global error smooth from node to node,
  // which the finite-difference consumers of these samples rely on.
  double r = start.r;
  Vec y0{start.f, start.fp};
  double h = options.initial_step;
  std::size_t steps = 0;
  if (march(r, y0, a, h, options, steps, [](double, const Vec&, double) {}) != MarchStatus::Reached)
    throw PreconditionError("trajectory does not reach r = " + std::to_string(a));
  const double spacing = (b - a) / (count - 1);
  for (int sub = 1; sub <= (1 << 16); sub *= 2) {
    std::vector<OdeState> out;
    out.reserve(static_cast<std::size_t>(count));
    out.push_back({a, y0[0], y0[1]});
    Vec y = y0;
    bool ok = true;
    for (int i = 1; i < count && ok; ++i) {
      for (int k = 0; k < sub; ++k) {
        const auto st = dp_step(y, spacing / sub, options);
        if (!(st.err <= 1.0) || std::abs(st.y[0]) > options.blow_up_cap) {
          ok = false;
          break;
        }
        y = st.y;
      }
      out.push_back({i + 1 == count ? b : a + spacing * i, y[0], y[1]});
    }
    if (ok) return out;
  }
  throw PreconditionError("trajectory does not reach r = " + std::to_string(b) + " at the requested tolerance");
}

SurfaceReport reconstruct_surface(const OdeSolution& sol, double a, double b, int samples) {
  if (samples < 8 || !(a < b)) throw ConfigurationError("reconstruction needs a < b and at least 8 samples");
  const WarpedProductMetric::Options opt;
  const int pad = opt.stencil_points / 2;
  const double h = (b - a) / (samples - 1);
  const double lo = a - pad * h, hi = b + pad * h;
  if (!(sol.lower.r < lo && hi < sol.upper.r))
    throw PreconditionError("sub-interval and its stencil margin must lie inside the integrated domain");
  auto states = sample_uniform(sol.initial, lo, hi, samples + 2 * pad);
  const double sign = states.front().fp > 0 ? 1.0 : -1.0;
  std::vector<double> phi(states.size()), dphi(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(sign * states[i].fp > 0.0))
      throw PreconditionError("f' vanishes inside the sub-interval near r = " + std::to_string(states[i].r));
    phi[i] = sign * states[i].fp;
    dphi[i] = -sign * 0.25 * states[i].f * states[i].f;  // the state's f''
  }
  auto surface = WarpedProductMetric::from_hermite(2, lo, hi, std::move(phi), std::move(dphi), opt);
  const auto c = warped_curvature(surface);
  SurfaceReport rep{surface, {}, {}, 0.0, 0.0};
  for (std::size_t i = static_cast<std::size_t>(pad); i < states.size() - static_cast<std::size_t>(pad); ++i) {
    const double R = c.scalar[i];
    rep.states.push_back(states[i]);
    rep.scalar.push_back(R);
    rep.scalar_error = std::max(rep.scalar_error, std::abs(R - states[i].f));
    const double rr = c.ddR[i] + 0.25 * R * R;
    const double tt = c.mean_curvature[i] * c.dR[i] + 0.25 * R * R;
    rep.hessian_residual = std::max(rep.hessian_residual, std::hypot(rr, tt));
  }
  return rep;
}

}  // namespace curvlab
