#include "symtop/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "symtop/errors.hpp"
#include "symtop/units.hpp"

namespace symtop {

double WavePacket::norm() const {
  double sum = 0.0;
  for (const auto& c : amplitudes) sum += std::norm(c);
  return std::sqrt(sum);
}

std::vector<double> WavePacket::populations() const {
  std::vector<double> out;
  out.reserve(amplitudes.size());
  for (const auto& c : amplitudes) out.push_back(std::norm(c));
  return out;
}

double WavePacket::population(int J) const {
  if (!subspace.contains(J)) return 0.0;
  return std::norm(amplitudes[static_cast<std::size_t>(subspace.index_of(J))]);
}

void PropagationConfig::validate() const {
  if (dt < 0.0) throw ConfigError("dt must be non-negative");
  if (dt == 0.0 && steps_per_carrier_period < 40) {
    throw ConfigError("steps_per_carrier_period must be >= 40");
  }
  if (jmax_buffer < 5) throw ConfigError("jmax_buffer must be >= 5");
  if (post_pulse_horizon < 0.0) throw ConfigError("post_pulse_horizon must be non-negative");
  if (post_pulse_samples < 3) throw ConfigError("post_pulse_samples must be >= 3");
  if (in_pulse_decimation < 1) throw ConfigError("in_pulse_decimation must be >= 1");
}

EnergyLadder build_field_free(const Subspace& sub, const RotorConstants& constants,
                              bool include_distortion) {
  EnergyLadder ladder;
  ladder.includes_distortion = include_distortion;
  const double reference = eigenenergy(sub.j_min(), sub.k0(), constants, include_distortion);
  ladder.energies.reserve(static_cast<std::size_t>(sub.dimension()));
  for (int i = 0; i < sub.dimension(); ++i) {
    const double e = eigenenergy(sub.j_at(i), sub.k0(), constants, include_distortion);
    ladder.energies.push_back(units::cm1_to_internal(e - reference));
  }
  return ladder;
}

Tridiagonal build_dipole(const Subspace& sub, const RotorConstants& constants) {
  Tridiagonal m = build_cos_matrix(sub);
  const double scale = -constants.mu0 * units::kDebyeFieldToRadPerPs;
  for (auto& v : m.diag) v *= scale;
  for (auto& v : m.off) v *= scale;
  return m;
}

namespace {

// Applies exp(-i h (H0 + f D)) to psi for real symmetric tridiagonal H0 + f D.
class TridiagonalExponential {
 public:
  TridiagonalExponential(const EnergyLadder& ladder, const Tridiagonal& dipole)
      : energies_(Eigen::Map<const Eigen::VectorXd>(ladder.energies.data(),
                                                    static_cast<Eigen::Index>(ladder.energies.size()))),
        dipole_diag_(Eigen::Map<const Eigen::VectorXd>(dipole.diag.data(),
                                                       static_cast<Eigen::Index>(dipole.diag.size()))),
        dipole_off_(Eigen::Map<const Eigen::VectorXd>(dipole.off.data(),
                                                      static_cast<Eigen::Index>(dipole.off.size()))),
        solver_(static_cast<Eigen::Index>(ladder.energies.size())) {}

  void apply(double field, double h, Eigen::VectorXd& re, Eigen::VectorXd& im) {
    diag_ = energies_ + field * dipole_diag_;
    off_ = field * dipole_off_;
    solver_.computeFromTridiagonal(diag_, off_, Eigen::ComputeEigenvectors);
    const auto& q = solver_.eigenvectors();
    const auto& w = solver_.eigenvalues();
    proj_re_.noalias() = q.transpose() * re;
    proj_im_.noalias() = q.transpose() * im;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double c = std::cos(w[k] * h);
      const double s = std::sin(w[k] * h);
      const double r = proj_re_[k];
      const double i = proj_im_[k];
      // (r + i i) * (c - i s)
      proj_re_[k] = r * c + i * s;
      proj_im_[k] = i * c - r * s;
    }
    re.noalias() = q * proj_re_;
    im.noalias() = q * proj_im_;
  }

 private:
  Eigen::VectorXd energies_;
  Eigen::VectorXd dipole_diag_;
  Eigen::VectorXd dipole_off_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd off_;
  Eigen::VectorXd proj_re_;
  Eigen::VectorXd proj_im_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

double select_step(const PulseSpec& pulse, const PropagationConfig& config) {
  if (config.dt > 0.0) return config.dt;
  const double omega = std::abs(pulse.omega0);
  double scale = 2.0 * std::numbers::pi * pulse.tau;
  if (omega > 0.0) scale = std::min(scale, 2.0 * std::numbers::pi / omega);
  return scale / config.steps_per_carrier_period;
}

double cos_expectation(const Eigen::VectorXd& re, const Eigen::VectorXd& im, const Tridiagonal& cosm) {
  double value = 0.0;
  const auto n = re.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    value += (re[i] * re[i] + im[i] * im[i]) * cosm.diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      value += 2.0 * (re[i] * re[i + 1] + im[i] * im[i + 1]) * cosm.off[static_cast<std::size_t>(i)];
    }
  }
  return value;
}

}  // namespace

PropagationResult propagate(const RotState& initial, const PulseSpec& pulse,
                            const PropagationConfig& config, const RotorConstants& constants) {
  initial.validate();
  pulse.validate();
  config.validate();
  constants.validate();

  const Subspace sub(initial.K, initial.M, initial.J + config.jmax_buffer);
  const auto ladder = build_field_free(sub, constants, config.include_distortion);
  const auto dipole = build_dipole(sub, constants);
  const auto cosm = build_cos_matrix(sub);
  const int n = sub.dimension();

  Eigen::VectorXd re = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd im = Eigen::VectorXd::Zero(n);
  re[sub.index_of(initial.J)] = 1.0;

  const double window = pulse.t_end - pulse.t_start;
  const long steps = std::max(1L, static_cast<long>(std::ceil(window / select_step(pulse, config) - 1e-9)));
  const double h = window / static_cast<double>(steps);

  // Fourth-order commutator-free Magnus: two exponentials per step with
  // Gauss-Legendre field samples. H0 enters each exponent with weight 1/2.
  const double gauss_offset = std::sqrt(3.0) / 6.0;
  const double w_early = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
  const double w_late = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;

  TridiagonalExponential expm(ladder, dipole);
  PropagationResult result;
  result.initial = initial;
  result.pulse = pulse;
  result.config = config;
  result.dt = h;
  result.steps = steps;

  if (config.record_in_pulse) result.in_pulse_trace.push_back({pulse.t_start, cos_expectation(re, im, cosm)});

  double drift = 0.0;
  for (long k = 0; k < steps; ++k) {
    const double t = pulse.t_start + static_cast<double>(k) * h;
    const double e1 = pulse.field(t + (0.5 - gauss_offset) * h);
    const double e2 = pulse.field(t + (0.5 + gauss_offset) * h);
    expm.apply(2.0 * (w_early * e1 + w_late * e2), 0.5 * h, re, im);
    expm.apply(2.0 * (w_late * e1 + w_early * e2), 0.5 * h, re, im);

    const double norm = std::sqrt(re.squaredNorm() + im.squaredNorm());
    drift = std::max(drift, std::abs(norm - 1.0));
    if (drift > kNormDriftLimit) {
      std::ostringstream os;
      os << "norm drift " << drift << " exceeds " << kNormDriftLimit << " at t=" << t + h
         << " ps; reduce dt";
      throw IntegrationError(os.str());
    }
    const double top = re[n - 1] * re[n - 1] + im[n - 1] * im[n - 1] + re[n - 2] * re[n - 2] +
                       im[n - 2] * im[n - 2];
    if (top > kTruncationThreshold) {
      std::ostringstream os;
      os << "population " << top << " reached the top of the J ladder (J_max=" << sub.j_max()
         << ") at t=" << t + h << " ps; raise jmax_buffer";
      throw TruncationError(os.str());
    }
    if (config.record_in_pulse && ((k + 1) % config.in_pulse_decimation == 0 || k + 1 == steps)) {
      result.in_pulse_trace.push_back({t + h, cos_expectation(re, im, cosm)});
    }
  }

  WavePacket packet{sub, {}, pulse.t_end, Representation::schrodinger};
  packet.amplitudes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) packet.amplitudes[static_cast<std::size_t>(i)] = {re[i], im[i]};

  result.norm_drift = drift;
  result.populations = packet.populations();
  result.beat_period = 2.0 * std::numbers::pi /
                       transition_frequency(initial.J, initial.K, constants, config.include_distortion);
  const double horizon = config.post_pulse_horizon > 0.0 ? config.post_pulse_horizon
                                                         : kDefaultHorizonBeats * result.beat_period;
  result.post_pulse_trace =
      field_free_trace(packet, horizon, config.post_pulse_samples, constants, config.include_distortion);
  const auto ext = max_orientation(result.post_pulse_trace, result.beat_period);
  result.max_orientation = ext.max;
  result.min_orientation = ext.min;
  result.t_at_max = ext.t_at_max;
  result.final_packet = std::move(packet);
  return result;
}

Trace field_free_trace(const WavePacket& packet, double horizon, int samples,
                       const RotorConstants& constants, bool include_distortion) {
  if (!(horizon > 0.0)) throw HorizonError("post-pulse horizon must be positive");
  if (samples < 2) throw HorizonError("a trace needs at least two samples");
  const auto& sub = packet.subspace;
  const auto ladder = build_field_free(sub, constants, include_distortion);
  const auto cosm = build_cos_matrix(sub);
  const auto& c = packet.amplitudes;
  const std::size_t n = c.size();

  double constant = 0.0;
  for (std::size_t i = 0; i < n; ++i) constant += std::norm(c[i]) * cosm.diag[i];

  // Coherences conj(c_J) c_{J+1} rotate at the adjacent level spacing.
  std::vector<std::complex<double>> coherence(n - 1);
  std::vector<double> spacing(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    coherence[i] = 2.0 * cosm.off[i] * std::conj(c[i]) * c[i + 1];
    spacing[i] = ladder.energies[i + 1] - ladder.energies[i];
  }

  Trace trace;
  trace.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const double elapsed = horizon * static_cast<double>(s) / static_cast<double>(samples - 1);
    double value = constant;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (coherence[i] == 0.0) continue;
      value += std::real(coherence[i] * std::polar(1.0, -spacing[i] * elapsed));
    }
    trace.push_back({packet.t_ref + elapsed, value});
  }
  return trace;
}

double expectation_cos(const WavePacket& packet) {
  const auto cosm = build_cos_matrix(packet.subspace);
  const int n = cosm.size();
  std::complex<double> sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sum += std::conj(packet.amplitudes[static_cast<std::size_t>(i)]) * cosm.at(i, j) *
             packet.amplitudes[static_cast<std::size_t>(j)];
    }
  }
  return sum.real();
}

OrientationExtrema max_orientation(const Trace& trace, double beat_period) {
  if (trace.empty()) throw HorizonError("empty orientation trace");
  const double span = trace.back().t - trace.front().t;
  if (beat_period > 0.0 && span < 3.0 * beat_period * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "trace spans " << span << " ps, need at least three beat periods (" << 3.0 * beat_period
       << " ps)";
    throw HorizonError(os.str());
  }

  const auto [lo_it, hi_it] = std::minmax_element(
      trace.begin(), trace.end(),
      [](const TracePoint& a, const TracePoint& b) { return a.cos_theta < b.cos_theta; });

  auto refine = [&trace](std::size_t i, bool maximum) {
    TracePoint best = trace[i];
    if (i == 0 || i + 1 >= trace.size()) return best;
    const double y0 = trace[i - 1].cos_theta;
    const double y1 = trace[i].cos_theta;
    const double y2 = trace[i + 1].cos_theta;
    const double curvature = y0 - 2.0 * y1 + y2;
    if (maximum ? curvature >= 0.0 : curvature <= 0.0) return best;
    const double offset = 0.5 * (y0 - y2) / curvature;
    const double h = trace[i + 1].t - trace[i].t;
    best.cos_theta = y1 - 0.25 * (y0 - y2) * offset;
    best.t = trace[i].t + offset * h;
    return best;
  };

  const auto top = refine(static_cast<std::size_t>(hi_it - trace.begin()), true);
  const auto bottom = refine(static_cast<std::size_t>(lo_it - trace.begin()), false);
  return {top.cos_theta, bottom.cos_theta, top.t, bottom.t};
}

std::pair<double, double> rabi_oracle_check(int J0, int K0, int M0, double theta,
                                            const RotorConstants& constants) {
  const RotState initial{J0, K0, M0};
  initial.validate();
  const double omega = transition_frequency(J0, K0, constants, true);
  const auto pulse = gaussian_pulse_for_area(theta, transition_dipole(J0, K0, M0, constants), omega,
                                             reference_duration(constants));
  const auto result = propagate(initial, pulse, PropagationConfig{}, constants);
  return {result.final_packet.population(J0), result.final_packet.population(J0 + 1)};
}

}  // namespace symtop
