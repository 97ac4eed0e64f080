#include "export.hpp"

#include <sstream>

#include "symtop/table.hpp"
#include "symtop/units.hpp"

namespace symtop::cli {

namespace {

void header(std::ostream& os, const std::string& key, double value) {
  os << "# " << key << " = " << format_number(value) << '\n';
}

void header(std::ostream& os, const std::string& key, const std::string& value) {
  os << "# " << key << " = " << value << '\n';
}

}  // namespace

std::string tool_version() { return SYMTOP_VERSION; }

std::string design_export(const TwoStateDesign& d, const PulseSpec& p) {
  Table t({"J0", "K0", "M0", "branch", "lambda", "c1", "c2", "theta_area_rad", "omega0_cm1", "tau_ps",
           "phi_rad", "peak_field_V_per_m"});
  t.row()
      .add(d.J0)
      .add(d.K0)
      .add(d.M0)
      .add(std::string(to_string(d.branch)))
      .add(d.lambda)
      .add(d.c1)
      .add(d.c2)
      .add(d.theta_area)
      .add(units::internal_to_cm1(p.omega0))
      .add(p.tau)
      .add(p.phi)
      .add(p.peak_field);
  std::ostringstream os;
  os << "# symtop design record\n";
  header(os, "code_version", tool_version());
  t.write(os);
  return os.str();
}

std::string trace_export(const TwoStateDesign& d, const PropagationResult& r, const RotorConstants& c,
                         std::optional<double> eta) {
  std::ostringstream os;
  os << "# symtop orientation trace\n";
  header(os, "code_version", tool_version());
  header(os, "initial.J0", r.initial.J);
  header(os, "initial.K0", r.initial.K);
  header(os, "initial.M0", r.initial.M);
  header(os, "design.branch", std::string(to_string(d.branch)));
  header(os, "design.lambda", d.lambda);
  header(os, "design.theta_area_rad", d.theta_area);
  header(os, "pulse.omega0_cm1", units::internal_to_cm1(r.pulse.omega0));
  header(os, "pulse.phi_rad", r.pulse.phi);
  header(os, "pulse.tau_ps", r.pulse.tau);
  header(os, "pulse.peak_field_V_per_m", r.pulse.peak_field);
  header(os, "pulse.t_start_ps", r.pulse.t_start);
  header(os, "pulse.t_end_ps", r.pulse.t_end);
  header(os, "pulse.eps1", r.pulse.eps1);
  header(os, "pulse.eps2", r.pulse.eps2);
  header(os, "config.dt_ps", r.dt);
  header(os, "config.steps", static_cast<double>(r.steps));
  header(os, "config.j_max", r.final_packet.subspace.j_max());
  header(os, "config.include_distortion", r.config.include_distortion ? "true" : "false");
  header(os, "config.post_pulse_samples", r.config.post_pulse_samples);
  header(os, "molecule.A_cm1", c.A);
  header(os, "molecule.C_cm1", c.C);
  header(os, "molecule.DJ_cm1", c.DJ);
  header(os, "molecule.DJK_cm1", c.DJK);
  header(os, "molecule.DK_cm1", c.DK);
  header(os, "molecule.mu0_debye", c.mu0);
  header(os, "result.max_orientation", r.max_orientation);
  header(os, "result.min_orientation", r.min_orientation);
  header(os, "result.t_at_max_ps", r.t_at_max);
  header(os, "result.beat_period_ps", r.beat_period);
  header(os, "result.norm_drift", r.norm_drift);
  header(os, "result.pop_J0", r.final_packet.population(r.initial.J));
  header(os, "result.pop_J0_plus_1", r.final_packet.population(r.initial.J + 1));
  if (eta) header(os, "result.eta", *eta);

  Table t({"t_ps", "cos_theta"});
  for (const auto& p : r.in_pulse_trace) t.row().add(p.t).add(p.cos_theta);
  for (const auto& p : r.post_pulse_trace) t.row().add(p.t).add(p.cos_theta);
  t.write(os);
  return os.str();
}

}  // namespace symtop::cli
