#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/functionals.hpp"
#include "curvlab/warped.hpp"

namespace curvlab {

/// Quantity compared against the residual target.
enum class FlowTarget { GradientSup, RicciSup, ScalarSup };
std::string to_string(FlowTarget t);
FlowTarget flow_target_from_string(const std::string& s);

/// Optional change of inner product for the descent direction. `Bilaplacian`
/// applies the Fourier multiplier (1 + |k|^2)^{-2} to every component, which
/// removes the k^4 stiffness of the gradient; critical points are unchanged.
enum class Preconditioner { None, Bilaplacian };
std::string to_string(Preconditioner p);
Preconditioner preconditioner_from_string(const std::string& s);

enum class FlowFamily { FullGrid, WarpedProfile };

struct FlowConfig {
  FunctionalSpec spec = FiniteT{0.0};
  double step = 1e-3;
  int max_steps = 1000;
  double residual_target = 1e-6;
  FlowTarget target = FlowTarget::GradientSup;
  FlowFamily family = FlowFamily::FullGrid;
  bool line_search = true;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double growth = 2.0;    // step multiplier after an accepted line-search step
  double max_step = 1e6;
  int max_halvings = 30;
  Preconditioner preconditioner = Preconditioner::None;
  Stencil stencil = Stencil::Spectral;
  // degeneracy guards
  double min_eigenvalue = 1e-3;  // grid metrics; warped profiles use min phi
  double min_profile = 1e-3;

  void validate() const;  // ConfigurationError on nonsensical values
};

struct FlowRecord {
  int step = 0;
  double value = 0.0;
  double grad_sup = 0.0;
  double grad_l2 = 0.0;
  double ricci_sup = 0.0;
  double min_eigenvalue = 0.0;
  double scalar_min = 0.0;
  double scalar_max = 0.0;
  double step_size = 0.0;  // step accepted after this record (0 for the last)
  int halvings = 0;
};

enum class FlowStop { ResidualReached, MaxSteps, Degenerate, NonFinite, LineSearchFailed };
std::string to_string(FlowStop s);

struct FlowTrace {
  std::vector<FlowRecord> records;
  FlowStop stop = FlowStop::MaxSteps;
  std::string message;

  bool monotone() const;  // value non-increasing along the records
};

struct FlowStepResult {
  MetricField metric;
  double step_used = 0.0;
  int halvings = 0;
};

/// g - eta G. A trial metric that is not positive definite is rejected and eta
/// halved; after `max_halvings` rejections DegenerateMetricError is thrown.
FlowStepResult flow_step(const MetricField& g, const FunctionalSpec& spec, double eta,
                         Stencil stencil = Stencil::Spectral, int max_halvings = 30);

/// Componentwise Fourier multiplier (1 + |k|^2)^{-2} on a periodic grid.
TensorField2 precondition(const TensorField2& T);
std::vector<double> precondition_periodic(const std::vector<double>& v, double length);

struct FlowResult {
  FlowTrace trace;
  MetricField metric;  // last valid metric
};

FlowResult run_flow(const MetricField& g0, const FlowConfig& config);

struct WarpedFlowResult {
  FlowTrace trace;
  WarpedProductMetric profile;
};

/// Descent on the profile samples with the L2 profile gradient
/// (functional derivative per unit r). Periodic profiles only when
/// preconditioned.
WarpedFlowResult warped_flow(const WarpedProductMetric& w0, const FlowConfig& config);

/// Flow restricted to a homogeneous Einstein family g = s g_unit: the
/// gradient is kappa(s) g, so s' = s (1 - eta kappa(s)). Returns the scales.
std::vector<double> homogeneous_flow(const HomogeneousEinstein& unit, const FunctionalSpec& spec, double scale0,
                                     double eta, int steps);

}  // namespace curvlab
