#pragma once

// Analytic two-state design: the orientation extrema of a superposition of
// |J0 K0 M0> and |J0+1 K0 M0>, the amplitudes that reach them, the pulse area
// that prepares those amplitudes and the Gaussian field carrying that area.

#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "symtop/rotor.hpp"

namespace symtop {

enum class Branch { positive, negative };

std::string_view to_string(Branch branch);
/// Accepts "+", "positive", "-", "negative". Throws ConfigError otherwise.
Branch parse_branch(std::string_view text);

struct ExtremaPair {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

/// Closed-form extrema of <cos theta> over normalized real two-state
/// superpositions, i.e. the eigenvalues of the 2x2 cos(theta) block.
ExtremaPair extrema(int J0, int K0, int M0);

struct Amplitudes {
  double c1 = 1.0;  // |J0 K0 M0>, always >= 0
  double c2 = 0.0;  // |J0+1 K0 M0>, sign follows the branch
};

Amplitudes optimal_amplitudes(int J0, int K0, int M0, Branch branch);

/// arccos(c1). Throws DomainError unless 0 <= c1 <= 1.
double required_pulse_area(double c1);

struct TwoStateDesign {
  int J0 = 0;
  int K0 = 0;
  int M0 = 0;
  Branch branch = Branch::positive;
  double lambda = 0.0;
  double c1 = 1.0;
  double c2 = 0.0;
  double theta_area = 0.0;
};

TwoStateDesign design_two_state(int J0, int K0, int M0, Branch branch);

enum class ResonanceModel { rigid, distortion_corrected };

std::string_view to_string(ResonanceModel model);
ResonanceModel parse_resonance_model(std::string_view text);

inline constexpr double kDefaultPhase = std::numbers::pi / 2.0;
inline constexpr double kWindowHalfWidthInTau = 5.0;

/// Gaussian carrier pulse E(t) = E0 exp(-t^2 / 2 tau^2) cos(omega0 t + phi),
/// hard-truncated to zero outside [t_start, t_end]. Frequencies in rad/ps,
/// times in ps, field in V/m.
struct PulseSpec {
  double omega0 = 0.0;
  double phi = kDefaultPhase;
  double tau = 0.0;
  double peak_field = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  bool window_override = false;

  double envelope(double t) const;
  double field(double t) const;

  /// tau > 0, t_start < 0 < t_end and, unless window_override, a window of
  /// at least +-5 tau. Throws DomainError.
  void validate() const;
};

/// mu0 * <J0+1|cos|J0> in rad/ps per V/m.
double transition_dipole(int J0, int K0, int M0, const RotorConstants& constants);

/// Gaussian pulse whose rotating-wave area equals theta for the given
/// transition dipole (rad/ps per V/m), centred at t = 0 over +-5 tau.
PulseSpec gaussian_pulse_for_area(double theta, double dipole, double omega0, double tau,
                                  double phi = kDefaultPhase);

/// Throws DesignError if the transition dipole vanishes.
PulseSpec design_gaussian_pulse(const TwoStateDesign& design, double tau, double phi,
                                const RotorConstants& constants, ResonanceModel model);

/// omega0 -> (1 + eps1) omega0 and area -> (1 + eps2) area. The recorded eps
/// fields compose multiplicatively. Throws DomainError if eps2 < -1.
PulseSpec apply_perturbation(const PulseSpec& pulse, double eps1, double eps2);

/// |dipole * integral E(t) exp(-i omega t) dt| over the window, counter-rotating
/// part included. Composite Gauss-Legendre.
double pulse_area(const PulseSpec& pulse, double dipole, double omega);

/// 1/2 * dipole * integral of the envelope over the window.
double resonant_pulse_area(const PulseSpec& pulse, double dipole);

/// <cos theta>(t) for the design's two-state packet with relative phase
/// relative_phase at t = 0. With relative_phase = 0 the branch extremum sits at
/// t = 0 and at every revival.
std::vector<double> analytic_two_state_trace(const TwoStateDesign& design, double relative_phase,
                                             std::span<const double> times,
                                             const RotorConstants& constants,
                                             bool include_distortion);

/// Independent check of extrema(): scans the mixing angle alpha over [0, pi]
/// with c1 = cos alpha, c2 = sin alpha on grid_size intervals.
/// Throws DomainError if grid_size < 10^4.
ExtremaPair brute_force_extrema(int J0, int K0, int M0, long grid_size);

}  // namespace symtop
