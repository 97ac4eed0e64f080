#include "symtop/pulse_design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "symtop/errors.hpp"
#include "symtop/units.hpp"

namespace symtop {
namespace {

struct TwoStateBlock {
  double lower;   // <J0|cos|J0>
  double upper;   // <J0+1|cos|J0+1>
  double coupling;  // <J0+1|cos|J0>
};

TwoStateBlock two_state_block(int J0, int K0, int M0) {
  return {cos_diag(J0, K0, M0), cos_diag(J0 + 1, K0, M0), cos_offdiag(J0, K0, M0)};
}

}  // namespace

std::string_view to_string(Branch branch) {
  return branch == Branch::positive ? "positive" : "negative";
}

Branch parse_branch(std::string_view text) {
  if (text == "+" || text == "positive" || text == "plus") return Branch::positive;
  if (text == "-" || text == "negative" || text == "minus") return Branch::negative;
  throw ConfigError("unknown branch '" + std::string(text) + "' (use + or -)");
}

std::string_view to_string(ResonanceModel model) {
  return model == ResonanceModel::rigid ? "rigid" : "distortion_corrected";
}

ResonanceModel parse_resonance_model(std::string_view text) {
  if (text == "rigid") return ResonanceModel::rigid;
  if (text == "distortion_corrected" || text == "distorted" || text == "full") {
    return ResonanceModel::distortion_corrected;
  }
  throw ConfigError("unknown resonance model '" + std::string(text) + "'");
}

ExtremaPair extrema(int J0, int K0, int M0) {
  const auto b = two_state_block(J0, K0, M0);
  const double mean = 0.5 * (b.lower + b.upper);
  const double radius = 0.5 * std::hypot(b.lower - b.upper, 2.0 * b.coupling);
  return {mean + radius, mean - radius};
}

Amplitudes optimal_amplitudes(int J0, int K0, int M0, Branch branch) {
  const auto b = two_state_block(J0, K0, M0);
  const auto ext = extrema(J0, K0, M0);
  const double lambda = branch == Branch::positive ? ext.lambda_plus : ext.lambda_minus;
  const double shift = lambda - b.lower;
  const double norm = std::hypot(shift, b.coupling);
  return {b.coupling / norm, shift / norm};
}

double required_pulse_area(double c1) {
  if (!(c1 >= 0.0 && c1 <= 1.0)) {
    throw DomainError("amplitude c1=" + std::to_string(c1) + " outside [0, 1]");
  }
  return std::acos(c1);
}

TwoStateDesign design_two_state(int J0, int K0, int M0, Branch branch) {
  const auto ext = extrema(J0, K0, M0);
  const auto amp = optimal_amplitudes(J0, K0, M0, branch);
  TwoStateDesign d;
  d.J0 = J0;
  d.K0 = K0;
  d.M0 = M0;
  d.branch = branch;
  d.lambda = branch == Branch::positive ? ext.lambda_plus : ext.lambda_minus;
  d.c1 = amp.c1;
  d.c2 = amp.c2;
  d.theta_area = required_pulse_area(std::min(amp.c1, 1.0));
  return d;
}

double PulseSpec::envelope(double t) const {
  if (t < t_start || t > t_end) return 0.0;
  const double x = t / tau;
  return peak_field * std::exp(-0.5 * x * x);
}

double PulseSpec::field(double t) const {
  const double env = envelope(t);
  return env == 0.0 ? 0.0 : env * std::cos(omega0 * t + phi);
}

void PulseSpec::validate() const {
  if (!(tau > 0.0)) throw DomainError("pulse width tau must be positive");
  if (!(t_start < 0.0 && t_end > 0.0)) {
    throw DomainError("pulse window must satisfy t_start < 0 < t_end");
  }
  const double half = kWindowHalfWidthInTau * tau * (1.0 - 1e-12);
  if (!window_override && (t_start > -half || t_end < half)) {
    throw DomainError("pulse window shorter than +-5 tau (set window_override to allow)");
  }
}

double transition_dipole(int J0, int K0, int M0, const RotorConstants& constants) {
  return constants.mu0 * cos_offdiag(J0, K0, M0) * units::kDebyeFieldToRadPerPs;
}

PulseSpec gaussian_pulse_for_area(double theta, double dipole, double omega0, double tau,
                                  double phi) {
  if (!(tau > 0.0)) throw DomainError("pulse width tau must be positive");
  if (!(dipole > 0.0)) throw DesignError("transition dipole vanishes; no pulse area reachable");
  PulseSpec p;
  p.omega0 = omega0;
  p.phi = phi;
  p.tau = tau;
  p.peak_field = std::sqrt(2.0 / std::numbers::pi) * theta / (dipole * tau);
  p.t_start = -kWindowHalfWidthInTau * tau;
  p.t_end = kWindowHalfWidthInTau * tau;
  return p;
}

PulseSpec design_gaussian_pulse(const TwoStateDesign& design, double tau, double phi,
                                const RotorConstants& constants, ResonanceModel model) {
  const double dipole = transition_dipole(design.J0, design.K0, design.M0, constants);
  if (!(dipole > 0.0)) {
    throw DesignError("zero transition dipole for J0=" + std::to_string(design.J0) +
                      ", K0=" + std::to_string(design.K0) + ", M0=" + std::to_string(design.M0));
  }
  const double omega0 = transition_frequency(design.J0, design.K0, constants,
                                             model == ResonanceModel::distortion_corrected);
  return gaussian_pulse_for_area(design.theta_area, dipole, omega0, tau, phi);
}

PulseSpec apply_perturbation(const PulseSpec& pulse, double eps1, double eps2) {
  if (eps2 < -1.0) {
    throw DomainError("amplitude deviation eps2=" + std::to_string(eps2) + " below -1");
  }
  PulseSpec p = pulse;
  p.omega0 *= 1.0 + eps1;
  p.peak_field *= 1.0 + eps2;
  p.eps1 = (1.0 + pulse.eps1) * (1.0 + eps1) - 1.0;
  p.eps2 = (1.0 + pulse.eps2) * (1.0 + eps2) - 1.0;
  return p;
}

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes{
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};

template <class F>
auto integrate_window(const PulseSpec& pulse, double omega, F&& integrand) {
  // Panels resolve both the carrier and the envelope.
  const double scale = std::min(pulse.tau, omega > 0.0 ? 2.0 * std::numbers::pi / omega : pulse.tau);
  const double span = pulse.t_end - pulse.t_start;
  const long panels = std::max(64L, static_cast<long>(std::ceil(16.0 * span / scale)));
  const double h = span / static_cast<double>(panels);
  decltype(integrand(0.0)) sum{};
  for (long k = 0; k < panels; ++k) {
    const double mid = pulse.t_start + (static_cast<double>(k) + 0.5) * h;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      sum += kGaussWeights[i] * integrand(mid + 0.5 * h * kGaussNodes[i]);
    }
  }
  return sum * (0.5 * h);
}

}  // namespace

double pulse_area(const PulseSpec& pulse, double dipole, double omega) {
  const auto integral = integrate_window(pulse, omega, [&](double t) {
    return pulse.field(t) * std::polar(1.0, -omega * t);
  });
  return std::abs(dipole * integral);
}

double resonant_pulse_area(const PulseSpec& pulse, double dipole) {
  return 0.5 * dipole * integrate_window(pulse, 0.0, [&](double t) { return pulse.envelope(t); });
}

std::vector<double> analytic_two_state_trace(const TwoStateDesign& design, double relative_phase,
                                             std::span<const double> times,
                                             const RotorConstants& constants,
                                             bool include_distortion) {
  const auto b = two_state_block(design.J0, design.K0, design.M0);
  const double omega = transition_frequency(design.J0, design.K0, constants, include_distortion);
  const double populations = design.c1 * design.c1 * b.lower + design.c2 * design.c2 * b.upper;
  const double beat = 2.0 * design.c1 * design.c2 * b.coupling;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(populations + beat * std::cos(omega * t - relative_phase));
  return out;
}

ExtremaPair brute_force_extrema(int J0, int K0, int M0, long grid_size) {
  if (grid_size < 10000) throw DomainError("brute-force grid needs at least 10^4 intervals");
  const double a = cos_diag(J0, K0, M0);
  const double b = cos_diag(J0 + 1, K0, M0);
  const double o = cos_offdiag(J0, K0, M0);

  // f(alpha) = a cos^2 + b sin^2 + 2 o sin cos. (cos alpha, sin alpha) advance
  // by a fixed rotation, re-anchored with exact sincos every block.
  constexpr long kBlock = 1024;
  const double step = std::numbers::pi / static_cast<double>(grid_size);
  const double cs = std::cos(step);
  const double sn = std::sin(step);
  double hi = -2.0;
  double lo = 2.0;
  for (long start = 0; start <= grid_size; start += kBlock) {
    const double alpha0 = static_cast<double>(start) * step;
    double c = std::cos(alpha0);
    double s = std::sin(alpha0);
    const long stop = std::min(grid_size, start + kBlock - 1);
    for (long k = start; k <= stop; ++k) {
      const double f = a * c * c + b * s * s + 2.0 * o * s * c;
      hi = std::max(hi, f);
      lo = std::min(lo, f);
      const double c_next = c * cs - s * sn;
      s = s * cs + c * sn;
      c = c_next;
    }
  }
  return {hi, lo};
}

}  // namespace symtop
