#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvlab/warped.hpp"

namespace curvlab {

// f'' = -f^2/4 with first integral E = f'^2 + f^3/6. On the surface
// dr^2 + f'(r)^2 dtheta^2, f is the scalar curvature.

struct OdeState {
  double r = 0.0;
  double f = 0.0;
  double fp = 0.0;
};

double energy(double f, double fp);
double energy(const OdeState& s);

enum class Family { Trivial, FamilyOne, FamilyTwo, FamilyThree };
std::string to_string(Family family);

/// |E| below this counts as the separatrix E = 0.
double separatrix_tolerance(double f0);

enum class EndKind { BlowUp, SpanLimit, StepUnderflow };
std::string to_string(EndKind kind);

struct DomainEnd {
  EndKind kind = EndKind::SpanLimit;
  double r = 0.0;             // last accepted abscissa
  double extrapolated = 0.0;  // blow-up location from f ~ -24/(r - r_b)^2, else r
};

struct OdeOptions {
  double r0 = 0.0;
  double r_min = -100.0;
  double r_max = 100.0;
  double rtol = 1e-12;
  double atol = 1e-12;
  double blow_up_cap = 1e8;
  double initial_step = 1e-3;
  std::size_t max_steps = 2'000'000;
};

struct OdeSolution {
  OdeState initial;
  std::vector<OdeState> samples;  // increasing r, includes the initial state
  double energy = 0.0;            // at the initial state
  Family family = Family::Trivial;
  DomainEnd lower;
  DomainEnd upper;
  /// max |E(r) - E(r0)| / max(1, f'^2, |f|^3/6) over the samples.
  double max_energy_drift = 0.0;
  std::optional<OdeState> critical;  // located zero of f'
};

OdeSolution integrate_ode(double f0, double fp0, const OdeOptions& options = {});

/// Phase-plane classification from the energy and the sign of f'.
Family classify_family(const OdeSolution& sol);

/// Checks the qualitative description of the solution's family on the
/// computed trajectory (sign of f, monotonicity of f', critical point,
/// blow-up sides and decay on unbounded sides). Empty when consistent.
std::string family_inconsistency(const OdeSolution& sol);

/// Maximal existence interval from the separated form df / sqrt(E - f^3/6) = +-dr.
struct DomainEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_finite = true;
  bool upper_finite = true;
  double turning = 0.0;       // f at the critical point, (6E)^{1/3}
  double error_estimate = 0.0;  // quadrature error bound reported by the integrators
};

DomainEstimate maximal_domain(double f0, double fp0, double r0 = 0.0);

/// States on a uniform grid of `count` points over [a, b], each landed on
/// exactly by the adaptive integrator.
std::vector<OdeState> sample_uniform(const OdeState& start, double a, double b, int count,
                                     const OdeOptions& options = {});

struct SurfaceReport {
  WarpedProductMetric surface;  // dr^2 + f'^2 dtheta^2, sampled with a half-stencil margin
  std::vector<OdeState> states;  // the samples inside [a, b]
  std::vector<double> scalar;    // curvature of the reconstructed surface there
  double scalar_error = 0.0;    // max |R - f|
  double hessian_residual = 0.0;  // max over samples of |Hess R + R^2/4 g|_g
};

/// Rebuilds the surface over [a, b] from samples of |f'| and its slope
/// (higher profile derivatives by finite differences) and checks R = f and
/// Hess R = -R^2/4 g.
SurfaceReport reconstruct_surface(const OdeSolution& sol, double a, double b, int samples = 401);

}  // namespace curvlab
