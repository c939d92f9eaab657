#pragma once

#include <iosfwd>

#include "curvlab/conformal_ode.hpp"
#include "curvlab/flow.hpp"

namespace curvlab::cli {

/// Phase portrait in the (f, f') plane: the trajectory over level sets of
/// f'^2 + f^3/6, the separatrix dashed.
void write_phase_portrait(std::ostream& out, const OdeSolution& sol);

/// log10 of the functional value and of the residual against the step.
void write_flow_trace(std::ostream& out, const FlowTrace& trace);

}  // namespace curvlab::cli
