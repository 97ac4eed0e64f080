#pragma once

// Time-dependent Schroedinger propagation on a single (K0, M0) ladder under
// H(t) = H0 - mu0 E(t) cos(theta), followed by analytic field-free evolution.

#include <complex>
#include <utility>
#include <vector>

#include "symtop/pulse_design.hpp"
#include "symtop/rotor.hpp"

namespace symtop {

enum class Representation { schrodinger, interaction };

struct WavePacket {
  Subspace subspace;
  std::vector<std::complex<double>> amplitudes;
  double t_ref = 0.0;
  Representation representation = Representation::schrodinger;

  double norm() const;
  std::vector<double> populations() const;
  double population(int J) const;
};

struct TracePoint {
  double t = 0.0;
  double cos_theta = 0.0;
};

using Trace = std::vector<TracePoint>;

struct OrientationExtrema {
  double max = 0.0;
  double min = 0.0;
  double t_at_max = 0.0;
  double t_at_min = 0.0;
};

struct PropagationConfig {
  double dt = 0.0;                   // ps; 0 selects from steps_per_carrier_period
  int steps_per_carrier_period = 200;
  int jmax_buffer = 25;              // J_max = J0 + jmax_buffer
  bool include_distortion = true;
  double post_pulse_horizon = 0.0;   // ps; 0 selects 5 beat periods
  int post_pulse_samples = 4001;
  bool record_in_pulse = false;
  int in_pulse_decimation = 50;

  /// Throws ConfigError on out-of-range settings.
  void validate() const;
};

inline constexpr double kTruncationThreshold = 1e-8;
inline constexpr double kNormDriftLimit = 1e-6;
inline constexpr double kDefaultHorizonBeats = 5.0;

struct PropagationResult {
  RotState initial;
  PulseSpec pulse;
  PropagationConfig config;
  WavePacket final_packet;
  std::vector<double> populations;  // indexed like the subspace
  Trace in_pulse_trace;
  Trace post_pulse_trace;
  double max_orientation = 0.0;
  double min_orientation = 0.0;
  double t_at_max = 0.0;
  double norm_drift = 0.0;
  double dt = 0.0;
  long steps = 0;
  double beat_period = 0.0;  // 2 pi / omega_{J0+1,J0}
};

/// Level energies in rad/ps relative to the lowest level of the ladder.
EnergyLadder build_field_free(const Subspace& sub, const RotorConstants& constants,
                              bool include_distortion);

/// -mu0 * cos(theta) in rad/ps per V/m; the control term is this matrix times E(t).
Tridiagonal build_dipole(const Subspace& sub, const RotorConstants& constants);

/// Propagates |J0 K0 M0> through the pulse window with a fourth-order
/// commutator-free Magnus stepper, then evaluates the post-pulse trace
/// analytically. Throws TruncationError when the top two levels of the ladder
/// exceed kTruncationThreshold, IntegrationError when the norm drifts by more
/// than kNormDriftLimit.
PropagationResult propagate(const RotState& initial, const PulseSpec& pulse,
                            const PropagationConfig& config, const RotorConstants& constants);

/// Field-free <cos theta>(t) of a packet on [t_ref, t_ref + horizon], sampled
/// uniformly at `samples` points. Throws HorizonError if horizon <= 0.
Trace field_free_trace(const WavePacket& packet, double horizon, int samples,
                       const RotorConstants& constants, bool include_distortion);

/// <psi| cos theta |psi> by a direct quadratic form.
double expectation_cos(const WavePacket& packet);

/// Signed extrema with parabolic refinement around the grid extremum. Throws
/// HorizonError for an empty trace or one spanning less than three beat periods.
OrientationExtrema max_orientation(const Trace& trace, double beat_period);

/// Full-propagation populations of (J0, J0+1) after a resonant Gaussian pulse
/// of area theta with tau = tau_0. The Magnus prediction is (cos^2, sin^2).
std::pair<double, double> rabi_oracle_check(int J0, int K0, int M0, double theta,
                                            const RotorConstants& constants);

}  // namespace symtop
