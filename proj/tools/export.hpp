#pragma once

#include <optional>
#include <string>

#include "symtop/propagator.hpp"
#include "symtop/pulse_design.hpp"
#include "symtop/rotor.hpp"

namespace symtop::cli {

/// Version string stamped into every output file and manifest.
std::string tool_version();

/// One-row design record: J0,K0,M0,branch,lambda,c1,c2,theta_area_rad,
/// omega0_cm1,tau_ps,phi_rad,peak_field_V_per_m.
std::string design_export(const TwoStateDesign& design, const PulseSpec& pulse);

/// "# key = value" header (pulse, propagation settings, constants, summary)
/// followed by t_ps,cos_theta rows: in-pulse samples first when recorded,
/// then the post-pulse trace.
std::string trace_export(const TwoStateDesign& design, const PropagationResult& result,
                         const RotorConstants& constants, std::optional<double> eta);

}  // namespace symtop::cli
