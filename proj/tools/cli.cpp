#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "export.hpp"
#include "manifest.hpp"
#include "symtop/errors.hpp"
#include "symtop/keyvalue.hpp"
#include "symtop/molecule_io.hpp"
#include "symtop/propagator.hpp"
#include "symtop/pulse_design.hpp"
#include "symtop/scan.hpp"
#include "symtop/units.hpp"

namespace symtop::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public Error {
 public:
  using Error::Error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<std::string> text(int v) { return std::to_string(v); }
std::optional<std::string> text(double v) { return fmt17(v); }
std::optional<std::string> text(bool v) { return v ? "true" : "false"; }
std::optional<std::string> text(const std::string& v) { return v; }
std::optional<std::string> text(const std::optional<int>& v) {
  if (!v) return std::nullopt;
  return std::to_string(*v);
}

/// Binds options to variables and remembers them so the resolved values can be
/// serialized into the manifest in registration order.
class Registry {
 public:
  explicit Registry(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    entries_.emplace_back(name, [&var] { return text(var); });
    return app_->add_option("--" + name, var, help);
  }

  CLI::App* app() const { return app_; }

  std::vector<std::pair<std::string, std::string>> resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, get] : entries_) {
      if (auto v = get()) out.emplace_back(name, *v);
    }
    return out;
  }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::optional<std::string>()>>> entries_;
};

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      return 0;  // rejected during validation
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------------------
// Option groups

struct CommonArgs {
  std::string molecule = "ch3i";
  std::string out = ".";

  void bind(Registry& r) {
    r.add("molecule", molecule, "Molecule preset name or key-value file");
    r.add("out", out, "Output directory");
  }
};

struct StateArgs {
  int j0 = 0;
  std::optional<int> k0;
  std::optional<int> m0;
  std::string branch = "positive";

  void bind(Registry& r) {
    r.add("j0", j0, "Initial J")->required();
    r.add("k0", k0, "Initial K (default J0)");
    r.add("m0", m0, "Initial M (default +-K0 by branch)");
    r.add("branch", branch, "Orientation branch: + or -");
  }

  Branch resolve() {
    const Branch b = parse_branch(branch);
    branch = std::string(to_string(b));
    if (!k0) k0 = j0;
    if (!m0) m0 = b == Branch::positive ? *k0 : -*k0;
    RotState{j0, *k0, *m0}.validate();
    return b;
  }
};

struct PulseArgs {
  double tau_units = 1.0;
  double tau_ps = 0.0;
  double phi = kDefaultPhase;
  std::string resonance = "distortion_corrected";

  void bind(Registry& r, bool with_tau = true) {
    if (with_tau) {
      r.add("tau-units", tau_units, "Pulse duration in units of tau_0 = pi / C");
      r.add("tau-ps", tau_ps, "Pulse duration in ps (overrides --tau-units)");
    }
    r.add("phi", phi, "Carrier phase in rad");
    r.add("resonance", resonance, "Carrier model: rigid or distortion_corrected");
  }

  /// Returns tau in ps and materializes tau_ps.
  double resolve(const RotorConstants& c) {
    if (!std::isfinite(phi)) throw ConfigError("--phi must be finite");
    resonance = std::string(to_string(parse_resonance_model(resonance)));
    if (!(tau_units > 0.0) || !std::isfinite(tau_units)) throw ConfigError("--tau-units must be positive");
    if (tau_ps < 0.0 || !std::isfinite(tau_ps)) throw ConfigError("--tau-ps must be positive");
    if (tau_ps == 0.0) tau_ps = tau_units * reference_duration(c);
    return tau_ps;
  }
};

struct PropagationArgs {
  double dt = 0.0;
  int steps_per_period = PropagationConfig{}.steps_per_carrier_period;
  int jmax_buffer = PropagationConfig{}.jmax_buffer;
  bool distortion = true;
  double horizon_ps = 0.0;
  int samples = PropagationConfig{}.post_pulse_samples;
  bool in_pulse = false;
  int in_pulse_decimation = PropagationConfig{}.in_pulse_decimation;

  void bind(Registry& r) {
    r.add("dt", dt, "Time step in ps (0 derives it from --steps-per-period)");
    r.add("steps-per-period", steps_per_period, "Steps per carrier period");
    r.add("jmax-buffer", jmax_buffer, "Levels above J0 kept in the basis");
    r.add("distortion", distortion, "Centrifugal distortion in the field-free Hamiltonian (true|false)");
    r.add("horizon-ps", horizon_ps, "Post-pulse trace length in ps (0 = five beat periods)");
    r.add("samples", samples, "Post-pulse trace samples");
    r.add("in-pulse", in_pulse, "Record <cos theta> during the pulse (true|false)");
    r.add("in-pulse-decimation", in_pulse_decimation, "Record every n-th in-pulse step");
  }

  PropagationConfig resolve() const {
    PropagationConfig c;
    c.dt = dt;
    c.steps_per_carrier_period = steps_per_period;
    c.jmax_buffer = jmax_buffer;
    c.include_distortion = distortion;
    c.post_pulse_horizon = horizon_ps;
    c.post_pulse_samples = samples;
    c.record_in_pulse = in_pulse;
    c.in_pulse_decimation = in_pulse_decimation;
    if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("--dt must be non-negative");
    if (horizon_ps < 0.0 || !std::isfinite(horizon_ps)) throw ConfigError("--horizon-ps must be non-negative");
    if (in_pulse_decimation < 1) throw ConfigError("--in-pulse-decimation must be >= 1");
    c.validate();
    return c;
  }
};

struct WorkerArgs {
  int workers = default_workers();

  void bind(Registry& r) { r.add("workers", workers, std::string("Scan worker threads (env ") + kWorkersEnv + ")"); }

  int resolve() const {
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    return workers;
  }
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" ", used) != std::string::npos) {
      throw ConfigError("invalid integer '" + item + "' in list '" + text + "'");
    }
    if (v < 0) throw ConfigError("J0 values must be non-negative");
    out.push_back(v);
  }
  return out;
}

std::vector<double> grid_or_throw(const std::string& text, const char* flag) {
  try {
    return parse_real_grid(text);
  } catch (const Error& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
}

std::string state_stem(const std::string& prefix, int j0, int k0, int m0, const std::string& branch) {
  return prefix + "_J0_" + std::to_string(j0) + "_K0_" + std::to_string(k0) + "_M0_" + std::to_string(m0) + "_" +
         branch;
}

// ---------------------------------------------------------------------------
// Execution

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void prepare() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& content, bool record = true) {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    if (record) files_.emplace_back(name, sha256_hex(content));
  }

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

/// What a validated command will do. `run` writes its data files and returns
/// kExitOk or kExitPartial.
struct Plan {
  RotorConstants constants;
  std::string stem;
  std::function<int(Outputs&, std::ostream&)> run;
};

struct Command {
  std::string name;  // "extrema", "scan robustness", ...
  CLI::App* app = nullptr;
  std::unique_ptr<Registry> registry;
  CommonArgs* common = nullptr;
  std::function<Plan()> prepare;  // validates; throws ConfigError / DomainError / DesignError
};

int execute(Command& cmd, const std::string& command_line, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.started_utc = utc_timestamp();
  Plan plan;
  try {
    plan = cmd.prepare();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  Outputs outputs(cmd.common->out);
  int code = kExitOk;
  try {
    outputs.prepare();
    code = plan.run(outputs, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  manifest.tool_version = tool_version();
  manifest.command = cmd.name;
  manifest.command_line = command_line;
  manifest.finished_utc = utc_timestamp();
  manifest.exit_code = code;
  manifest.config = cmd.registry->resolved();
  manifest.constants = plan.constants;
  manifest.outputs = outputs.files();
  try {
    outputs.write(plan.stem + ".manifest", manifest.str(), false);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  if (code == kExitPartial) err << "warning: some grid points failed; see the error column\n";
  return code;
}

// ---------------------------------------------------------------------------
// Commands

struct ExtremaCmd {
  CommonArgs common;
  StateArgs state;

  Plan prepare() {
    if (state.j0 < 0) throw ConfigError("--j0 must be non-negative");
    const Branch branch = parse_branch(state.branch);
    state.branch = std::string(to_string(branch));
    if (state.k0 || state.m0) state.resolve();
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    p.stem = "extrema_J0_" + std::to_string(state.j0);
    p.run = [this, branch, stem = p.stem](Outputs& o, std::ostream& out) {
      const auto grid = extrema_grid(state.j0);
      o.write(stem + ".csv", to_table(grid).str());
      int k0 = 0;
      int m0 = 0;
      if (state.k0) {
        k0 = *state.k0;
        m0 = *state.m0;
      } else {
        const auto& corner = branch == Branch::positive ? grid.argmax_plus.back() : grid.argmin_minus.back();
        k0 = corner.first;
        m0 = corner.second;
      }
      const auto ext = extrema(state.j0, k0, m0);
      const auto amp = optimal_amplitudes(state.j0, k0, m0, branch);
      out << "J0 = " << state.j0 << ", K0 = " << k0 << ", M0 = " << m0 << '\n';
      out << "lambda_plus = " << format_number(ext.lambda_plus) << '\n';
      out << "lambda_minus = " << format_number(ext.lambda_minus) << '\n';
      out << "branch = " << state.branch << ", c1 = " << format_number(amp.c1)
          << ", c2 = " << format_number(amp.c2) << '\n';
      out << "grid max lambda_plus = " << format_number(grid.max_plus)
          << ", grid min lambda_minus = " << format_number(grid.min_minus) << '\n';
      out << "wrote " << stem << ".csv\n";
      return kExitOk;
    };
    return p;
  }
};

struct DesignCmd {
  CommonArgs common;
  StateArgs state;
  PulseArgs pulse;

  Plan prepare() {
    const Branch branch = state.resolve();
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const double tau = pulse.resolve(p.constants);
    const auto design = design_two_state(state.j0, *state.k0, *state.m0, branch);
    const auto spec =
        design_gaussian_pulse(design, tau, pulse.phi, p.constants, parse_resonance_model(pulse.resonance));
    spec.validate();
    p.stem = state_stem("design", state.j0, *state.k0, *state.m0, state.branch);
    p.run = [design, spec, stem = p.stem](Outputs& o, std::ostream& out) {
      o.write(stem + ".txt", design_export(design, spec));
      out << "lambda = " << format_number(design.lambda) << '\n';
      out << "theta_area_rad = " << format_number(design.theta_area) << '\n';
      out << "omega0_cm1 = " << format_number(units::internal_to_cm1(spec.omega0)) << '\n';
      out << "tau_ps = " << format_number(spec.tau) << '\n';
      out << "peak_field_V_per_m = " << format_number(spec.peak_field) << '\n';
      out << "wrote " << stem << ".txt\n";
      return kExitOk;
    };
    return p;
  }
};

struct PropagateCmd {
  CommonArgs common;
  StateArgs state;
  PulseArgs pulse;
  PropagationArgs propagation;
  double eps1 = 0.0;
  double eps2 = 0.0;

  Plan prepare() {
    const Branch branch = state.resolve();
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const double tau = pulse.resolve(p.constants);
    const auto config = propagation.resolve();
    if (!std::isfinite(eps1) || !std::isfinite(eps2)) throw ConfigError("--eps1/--eps2 must be finite");
    if (eps1 <= -1.0) throw ConfigError("--eps1 must exceed -1");
    const auto design = design_two_state(state.j0, *state.k0, *state.m0, branch);
    const auto nominal =
        design_gaussian_pulse(design, tau, pulse.phi, p.constants, parse_resonance_model(pulse.resonance));
    const auto spec = apply_perturbation(nominal, eps1, eps2);
    spec.validate();
    p.stem = state_stem("trace", state.j0, *state.k0, *state.m0, state.branch);
    p.run = [design, spec, config, constants = p.constants, branch, stem = p.stem](Outputs& o, std::ostream& out) {
      const RotState initial{design.J0, design.K0, design.M0};
      const auto r = propagate(initial, spec, config, constants);
      const double baseline = cos_diag(design.J0, design.K0, design.M0);
      std::optional<double> eta;
      if (std::abs(design.lambda - baseline) > 1e-14) {
        eta = enhancement_fidelity(design.lambda, branch_extremum(r, branch), baseline);
      }
      o.write(stem + ".txt", trace_export(design, r, constants, eta));
      out << "max_orientation = " << format_number(r.max_orientation) << '\n';
      out << "min_orientation = " << format_number(r.min_orientation) << '\n';
      out << "lambda = " << format_number(design.lambda) << '\n';
      if (eta) out << "eta = " << format_number(*eta) << '\n';
      out << "pop_J0 = " << format_number(r.final_packet.population(design.J0))
          << ", pop_J0_plus_1 = " << format_number(r.final_packet.population(design.J0 + 1)) << '\n';
      out << "norm_drift = " << format_number(r.norm_drift) << '\n';
      out << "wrote " << stem << ".txt\n";
      return kExitOk;
    };
    return p;
  }
};

ScanOptions scan_options(PulseArgs& pulse, const PropagationArgs& propagation, const WorkerArgs& workers,
                         const RotorConstants& c) {
  ScanOptions o;
  o.tau = pulse.resolve(c);
  o.phi = pulse.phi;
  o.resonance = parse_resonance_model(pulse.resonance);
  o.propagation = propagation.resolve();
  o.workers = workers.resolve();
  return o;
}

struct SweepCmd {
  CommonArgs common;
  PulseArgs pulse;
  PropagationArgs propagation;
  WorkerArgs workers;
  int j0_first = 0;
  int j0_last = 130;
  std::string condition = "KM_plus_J0sq";
  bool with_propagation = false;

  Plan prepare() {
    if (j0_first < 0 || j0_last < j0_first) throw ConfigError("need 0 <= --j0-first <= --j0-last");
    const auto cond = parse_km_condition(condition);
    condition = std::string(to_string(cond));
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const auto options = scan_options(pulse, propagation, workers, p.constants);
    p.stem = "sweep_" + condition + "_J0_" + std::to_string(j0_first) + "_" + std::to_string(j0_last);
    p.run = [this, cond, options, constants = p.constants, stem = p.stem](Outputs& o, std::ostream& out) {
      const auto rows = j0_sweep(j0_first, j0_last, cond, constants, with_propagation ? &options : nullptr);
      o.write(stem + ".csv", to_table(rows).str());
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
      out << rows.size() << " rows, " << failed << " failed\n";
      out << "wrote " << stem << ".csv\n";
      return failed > 0 ? kExitPartial : kExitOk;
    };
    return p;
  }
};

struct DynamicsCmd {
  CommonArgs common;
  PulseArgs pulse;
  PropagationArgs propagation;
  WorkerArgs workers;
  std::string j0_list = "0,2,5,10,30,57";
  std::string branch = "positive";

  Plan prepare() {
    const auto list = parse_int_list(j0_list);
    const Branch b = parse_branch(branch);
    branch = std::string(to_string(b));
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const auto options = scan_options(pulse, propagation, workers, p.constants);
    p.stem = "dynamics_" + branch;
    p.run = [list, b, options, constants = p.constants, stem = p.stem](Outputs& o, std::ostream& out) {
      const auto items = dynamics_suite(list, b, constants, options);
      o.write(stem + ".csv", to_table(items).str());
      std::size_t failed = 0;
      for (const auto& item : items) {
        if (!item.error.empty() || !item.result) {
          ++failed;
          continue;
        }
        out << "J0 = " << item.design.J0 << ": lambda = " << format_number(item.design.lambda)
            << ", max = " << format_number(item.result->max_orientation)
            << ", min = " << format_number(item.result->min_orientation) << '\n';
      }
      out << "wrote " << stem << ".csv\n";
      return failed > 0 ? kExitPartial : kExitOk;
    };
    return p;
  }
};

struct DistortionCmd {
  CommonArgs common;
  PulseArgs pulse;
  PropagationArgs propagation;
  WorkerArgs workers;
  int j0_first = 0;
  int j0_last = 19;
  std::string branch = "positive";

  Plan prepare() {
    if (j0_first < 0 || j0_last < j0_first) throw ConfigError("need 0 <= --j0-first <= --j0-last");
    const Branch b = parse_branch(branch);
    branch = std::string(to_string(b));
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const auto options = scan_options(pulse, propagation, workers, p.constants);
    p.stem = "distortion_" + branch + "_J0_" + std::to_string(j0_first) + "_" + std::to_string(j0_last);
    p.run = [this, b, options, constants = p.constants, stem = p.stem](Outputs& o, std::ostream& out) {
      const auto rows = distortion_compare(j0_first, j0_last, b, constants, options);
      o.write(stem + ".csv", to_table(rows).str());
      std::size_t failed = 0;
      double worst = 0.0;
      for (const auto& r : rows) {
        if (!r.error.empty()) ++failed;
        if (auto d = r.difference()) worst = std::max(worst, std::abs(*d));
      }
      out << rows.size() << " rows, " << failed << " failed, max |difference| = " << format_number(worst) << '\n';
      out << "wrote " << stem << ".csv\n";
      return failed > 0 ? kExitPartial : kExitOk;
    };
    return p;
  }
};

struct RobustnessCmd {
  CommonArgs common;
  StateArgs state;
  PulseArgs pulse;
  PropagationArgs propagation;
  WorkerArgs workers;
  std::string eps1 = "-0.15:0.15:41";
  std::string eps2 = "-0.25:0.25:41";

  Plan prepare() {
    const Branch b = state.resolve();
    const auto g1 = grid_or_throw(eps1, "--eps1");
    const auto g2 = grid_or_throw(eps2, "--eps2");
    if (g1.front() <= -1.0) throw ConfigError("--eps1 values must exceed -1");
    if (g2.front() < -1.0) throw ConfigError("--eps2 values must be >= -1");
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const auto options = scan_options(pulse, propagation, workers, p.constants);
    design_two_state(state.j0, *state.k0, *state.m0, b);
    p.stem = state_stem("robustness", state.j0, *state.k0, *state.m0, state.branch);
    p.run = [this, b, g1, g2, options, constants = p.constants, stem = p.stem](Outputs& o, std::ostream& out) {
      const auto map = robustness_map(state.j0, *state.k0, *state.m0, g1, g2, b, constants, options);
      o.write(stem + ".csv", to_table(map).str());
      double lo = 1.0;
      for (const auto& c : map.cells) {
        if (c.eta) lo = std::min(lo, *c.eta);
      }
      out << map.cells.size() << " points, " << map.failures() << " failed, min eta = " << format_number(lo) << '\n';
      out << "wrote " << stem << ".csv\n";
      return map.failures() > 0 ? kExitPartial : kExitOk;
    };
    return p;
  }
};

struct DurationCmd {
  CommonArgs common;
  StateArgs state;
  PulseArgs pulse;
  PropagationArgs propagation;
  WorkerArgs workers;
  std::string tau = "0.1:2.0:20";

  Plan prepare() {
    const Branch b = state.resolve();
    const auto grid = grid_or_throw(tau, "--tau");
    if (!(grid.front() > 0.0)) throw ConfigError("--tau values must be positive");
    Plan p;
    p.constants = resolve_molecule(common.molecule);
    const auto options = scan_options(pulse, propagation, workers, p.constants);
    design_two_state(state.j0, *state.k0, *state.m0, b);
    p.stem = state_stem("duration", state.j0, *state.k0, *state.m0, state.branch);
    p.run = [this, b, grid, options, constants = p.constants, stem = p.stem](Outputs& o, std::ostream& out) {
      const auto scan = duration_scan(state.j0, *state.k0, *state.m0, grid, b, constants, options);
      o.write(stem + ".csv", to_table(scan).str());
      const auto failed =
          std::count_if(scan.rows.begin(), scan.rows.end(), [](const DurationRow& r) { return !r.error.empty(); });
      out << "lambda = " << format_number(scan.lambda) << '\n';
      if (scan.min_sufficient_tau_units) {
        out << "smallest sufficient tau = " << format_number(*scan.min_sufficient_tau_units) << " tau_0\n";
      } else {
        out << "no tau in the grid reaches lambda within " << format_number(kDurationTolerance) << '\n';
      }
      out << "wrote " << stem << ".csv\n";
      return failed > 0 ? kExitPartial : kExitOk;
    };
    return p;
  }
};

// ---------------------------------------------------------------------------
// Argument preprocessing

std::string join_command_line(const std::vector<std::string>& args) {
  std::string s = "symtop";
  for (const auto& a : args) {
    s += ' ';
    if (a.find_first_of(" \t\"'") != std::string::npos || a.empty()) {
      s += '"' + a + '"';
    } else {
      s += a;
    }
  }
  return s;
}

std::size_t leading_positionals(const std::vector<std::string>& args) {
  std::size_t n = 0;
  while (n < args.size() && !args[n].starts_with("-")) ++n;
  return n;
}

/// Removes --config FILE and splices the file's [config] entries (or its
/// unsectioned keys) in front of the explicit flags, which therefore win.
void splice_config_file(std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      --i;
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      --i;
    }
  }
  if (!path) return;
  const auto doc = KeyValueDocument::load(*path);
  const auto entries = doc.has_section("config") ? doc.section("config") : doc.section("");
  std::vector<std::string> injected;
  for (const auto& [key, value] : entries) {
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(leading_positionals(args)), injected.begin(),
              injected.end());
}

/// "--flag -0.15:0.15:9" becomes "--flag=-0.15:0.15:9" so negative values are
/// never mistaken for options.
void attach_negative_values(std::vector<std::string>& args) {
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    const auto& a = args[i];
    const auto& next = args[i + 1];
    if (a.starts_with("--") && a.find('=') == std::string::npos && next.size() > 1 && next[0] == '-' &&
        (std::isdigit(static_cast<unsigned char>(next[1])) || next[1] == '.')) {
      args[i] = a + "=" + next;
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }
}

int replay(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.size() < 2 || args[1].starts_with("-")) {
    err << "usage: symtop replay MANIFEST [--out DIR]\n";
    return kExitUsage;
  }
  const std::string& path = args[1];
  if (!fs::is_regular_file(path)) {
    err << "error: cannot read manifest '" << path << "'\n";
    return kExitIo;
  }
  std::vector<std::string> rebuilt;
  try {
    const auto doc = KeyValueDocument::load(path);
    const auto command = doc.find("run", "command");
    if (!command) throw ConfigError("manifest has no [run] command");
    std::stringstream ss(*command);
    for (std::string tok; ss >> tok;) rebuilt.push_back(tok);
    for (const auto& [key, value] : doc.section("config")) {
      rebuilt.push_back("--" + key);
      rebuilt.push_back(value);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  rebuilt.push_back("--molecule");
  rebuilt.push_back(path);
  rebuilt.insert(rebuilt.end(), args.begin() + 2, args.end());
  return run(rebuilt, out, err);
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && args[0] == "replay") return replay(args, out, err);

  const std::string command_line = join_command_line(args);
  try {
    splice_config_file(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  attach_negative_values(args);

  CLI::App app{"Analytic pulse design and TDSE simulation of symmetric-top orientation", "symtop"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  app.add_subcommand("replay", "Re-run a command from its manifest: replay MANIFEST [--out DIR]");

  std::vector<Command> commands;
  auto make = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help) {
    Command c;
    c.name = full;
    c.app = parent->add_subcommand(name, help);
    c.registry = std::make_unique<Registry>(c.app);
    return c;
  };

  ExtremaCmd extrema_cmd;
  DesignCmd design_cmd;
  PropagateCmd propagate_cmd;
  SweepCmd sweep_cmd;
  DynamicsCmd dynamics_cmd;
  DistortionCmd distortion_cmd;
  RobustnessCmd robustness_cmd;
  DurationCmd duration_cmd;

  {
    auto c = make(&app, "extrema", "extrema", "Orientation extrema over the (K0, M0) grid at J0");
    extrema_cmd.state.bind(*c.registry);
    extrema_cmd.common.bind(*c.registry);
    c.common = &extrema_cmd.common;
    c.prepare = [&] { return extrema_cmd.prepare(); };
    commands.push_back(std::move(c));
  }
  {
    auto c = make(&app, "design", "design", "Two-state design and Gaussian pulse for one initial state");
    design_cmd.state.bind(*c.registry);
    design_cmd.pulse.bind(*c.registry);
    design_cmd.common.bind(*c.registry);
    c.common = &design_cmd.common;
    c.prepare = [&] { return design_cmd.prepare(); };
    commands.push_back(std::move(c));
  }
  {
    auto c = make(&app, "propagate", "propagate", "Propagate one designed pulse and export the trace");
    auto& r = *c.registry;
    propagate_cmd.state.bind(r);
    propagate_cmd.pulse.bind(r);
    r.add("eps1", propagate_cmd.eps1, "Relative carrier frequency deviation");
    r.add("eps2", propagate_cmd.eps2, "Relative pulse area deviation");
    propagate_cmd.propagation.bind(r);
    propagate_cmd.common.bind(r);
    c.common = &propagate_cmd.common;
    c.prepare = [&] { return propagate_cmd.prepare(); };
    commands.push_back(std::move(c));
  }

  CLI::App* scan = app.add_subcommand("scan", "Parameter sweeps");
  scan->require_subcommand(1);
  {
    auto c = make(scan, "sweep", "scan sweep", "Analytic extrema versus J0, optionally propagated");
    auto& r = *c.registry;
    r.add("j0-first", sweep_cmd.j0_first, "First J0");
    r.add("j0-last", sweep_cmd.j0_last, "Last J0");
    r.add("condition", sweep_cmd.condition, "KM_zero, KM_plus_J0sq or KM_minus_J0sq");
    r.add("propagate", sweep_cmd.with_propagation, "Also propagate each designed pulse (true|false)");
    sweep_cmd.pulse.bind(r);
    sweep_cmd.propagation.bind(r);
    sweep_cmd.workers.bind(r);
    sweep_cmd.common.bind(r);
    c.common = &sweep_cmd.common;
    c.prepare = [&] { return sweep_cmd.prepare(); };
    commands.push_back(std::move(c));
  }
  {
    auto c = make(scan, "dynamics", "scan dynamics", "Designed-pulse dynamics for a list of J0 (K0 = J0)");
    auto& r = *c.registry;
    r.add("j0-list", dynamics_cmd.j0_list, "Comma-separated J0 values");
    r.add("branch", dynamics_cmd.branch, "Orientation branch: + or -");
    dynamics_cmd.pulse.bind(r);
    dynamics_cmd.propagation.bind(r);
    dynamics_cmd.workers.bind(r);
    dynamics_cmd.common.bind(r);
    c.common = &dynamics_cmd.common;
    c.prepare = [&] { return dynamics_cmd.prepare(); };
    commands.push_back(std::move(c));
  }
  {
    auto c = make(scan, "distortion", "scan distortion", "Full versus rigid field-free Hamiltonian");
    auto& r = *c.registry;
    r.add("j0-first", distortion_cmd.j0_first, "First J0");
    r.add("j0-last", distortion_cmd.j0_last, "Last J0");
    r.add("branch", distortion_cmd.branch, "Orientation branch: + or -");
    distortion_cmd.pulse.bind(r);
    distortion_cmd.propagation.bind(r);
    distortion_cmd.workers.bind(r);
    distortion_cmd.common.bind(r);
    c.common = &distortion_cmd.common;
    c.prepare = [&] { return distortion_cmd.prepare(); };
    commands.push_back(std::move(c));
  }
  {
    auto c = make(scan, "robustness", "scan robustness", "Enhancement fidelity over an (eps1, eps2) grid");
    auto& r = *c.registry;
    robustness_cmd.state.bind(r);
    r.add("eps1", robustness_cmd.eps1, "Frequency deviation grid start:stop:count");
    r.add("eps2", robustness_cmd.eps2, "Area deviation grid start:stop:count");
    robustness_cmd.pulse.bind(r);
    robustness_cmd.propagation.bind(r);
    robustness_cmd.workers.bind(r);
    robustness_cmd.common.bind(r);
    c.common = &robustness_cmd.common;
    c.prepare = [&] { return robustness_cmd.prepare(); };
    commands.push_back(std::move(c));
  }
  {
    auto c = make(scan, "duration", "scan duration", "Reached extremum versus pulse duration");
    auto& r = *c.registry;
    duration_cmd.state.bind(r);
    r.add("tau", duration_cmd.tau, "Duration grid in tau_0 units, start:stop:count");
    duration_cmd.pulse.bind(r, false);
    duration_cmd.propagation.bind(r);
    duration_cmd.workers.bind(r);
    duration_cmd.common.bind(r);
    c.common = &duration_cmd.common;
    c.prepare = [&] { return duration_cmd.prepare(); };
    commands.push_back(std::move(c));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (auto& c : commands) {
    if (c.app->parsed()) return execute(c, command_line, out, err);
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace symtop::cli
