#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "symtop/errors.hpp"
#include "symtop/propagator.hpp"
#include "symtop/units.hpp"

using namespace symtop;
using doctest::Approx;

namespace {

const RotorConstants kCh3i = RotorConstants::ch3i();

PulseSpec designed(int J0, int K0, int M0, Branch branch, double tau_units = 1.0) {
  const auto d = design_two_state(J0, K0, M0, branch);
  return design_gaussian_pulse(d, tau_units * reference_duration(kCh3i), kDefaultPhase, kCh3i,
                               ResonanceModel::distortion_corrected);
}

double amplitude_distance(const WavePacket& a, const WavePacket& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) sum += std::norm(a.amplitudes[i] - b.amplitudes[i]);
  return std::sqrt(sum);
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("field-free ladder") {
    const Subspace sub(2, 1, 12);
    const auto full = build_field_free(sub, kCh3i, true);
    const auto rigid = build_field_free(sub, kCh3i, false);
    REQUIRE(full.energies.size() == 11);
    CHECK(full.includes_distortion);
    CHECK_FALSE(rigid.includes_distortion);
    CHECK(full.energies[0] == 0.0);
    for (int i = 1; i < sub.dimension(); ++i) {
      const int J = sub.j_at(i);
      const double rigid_gap = oracle::energy_cm1(J, 2, kCh3i.A, kCh3i.C, 0, 0, 0) -
                               oracle::energy_cm1(2, 2, kCh3i.A, kCh3i.C, 0, 0, 0);
      CHECK(rigid.energies[static_cast<std::size_t>(i)] == Approx(rigid_gap * oracle::kTwoPiC).epsilon(1e-13));
      CHECK(full.energies[static_cast<std::size_t>(i)] < rigid.energies[static_cast<std::size_t>(i)]);
    }
  }

  TEST_CASE("dipole operator") {
    const Subspace sub(0, 0, 6);
    const auto d = build_dipole(sub, kCh3i);
    const double scale = kCh3i.mu0 * units::kDebyeFieldToRadPerPs;
    CHECK(d.at(0, 1) == Approx(-scale / std::sqrt(3.0)).epsilon(1e-14));
    for (int i = 0; i < d.size(); ++i) CHECK(d.at(i, i) == 0.0);
  }

  TEST_CASE("configuration validation") {
    PropagationConfig c;
    CHECK_NOTHROW(c.validate());
    c.steps_per_carrier_period = 39;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.dt = 0.1;
    CHECK_NOTHROW(c.validate());
    c = {};
    c.jmax_buffer = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.post_pulse_samples = 2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.dt = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("zero field leaves the state alone") {
    auto p = designed(2, 2, 2, Branch::positive);
    p.peak_field = 0.0;
    const auto r = propagate({2, 2, 2}, p, {}, kCh3i);
    CHECK(r.final_packet.population(2) == Approx(1.0).epsilon(1e-14));
    CHECK(r.max_orientation == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.min_orientation == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.norm_drift < 1e-13);
  }

  TEST_CASE("ground-state pulse reaches the two-state limit") {
    const auto r = propagate({0, 0, 0}, designed(0, 0, 0, Branch::positive), {}, kCh3i);
    CHECK(std::abs(r.max_orientation - 1.0 / std::sqrt(3.0)) < 0.005);
    CHECK(r.final_packet.population(0) == Approx(0.5).epsilon(2e-3));
    CHECK(r.final_packet.population(1) == Approx(0.5).epsilon(2e-3));
    CHECK(r.norm_drift < 1e-8);
    CHECK(r.final_packet.norm() == Approx(1.0).epsilon(1e-9));
    double total = 0.0;
    for (double p : r.populations) total += p;
    CHECK(total == Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("negative branch mirrors the positive one") {
    const auto plus = propagate({2, 2, 2}, designed(2, 2, 2, Branch::positive), {}, kCh3i);
    const auto minus = propagate({2, 2, -2}, designed(2, 2, -2, Branch::negative), {}, kCh3i);
    CHECK(minus.min_orientation == Approx(-plus.max_orientation).epsilon(1e-6));
    CHECK(minus.max_orientation == Approx(-plus.min_orientation).epsilon(1e-6));
  }

  TEST_CASE("trace agrees with the direct expectation value") {
    const auto r = propagate({1, 1, 0}, designed(1, 1, 0, Branch::positive), {}, kCh3i);
    CHECK(r.post_pulse_trace.front().t == Approx(r.pulse.t_end));
    CHECK(r.post_pulse_trace.front().cos_theta == Approx(expectation_cos(r.final_packet)).epsilon(1e-12));
    CHECK(r.post_pulse_trace.size() == 4001);
    CHECK(r.post_pulse_trace.back().t - r.post_pulse_trace.front().t ==
          Approx(kDefaultHorizonBeats * r.beat_period).epsilon(1e-12));
  }

  TEST_CASE("in-pulse recording") {
    PropagationConfig c;
    c.record_in_pulse = true;
    c.in_pulse_decimation = 10;
    const auto r = propagate({0, 0, 0}, designed(0, 0, 0, Branch::positive), c, kCh3i);
    REQUIRE(r.in_pulse_trace.size() >= 2);
    CHECK(r.in_pulse_trace.front().t == Approx(r.pulse.t_start));
    CHECK(r.in_pulse_trace.front().cos_theta == 0.0);
    CHECK(r.in_pulse_trace.back().t == Approx(r.pulse.t_end));
    CHECK(r.in_pulse_trace.back().cos_theta == Approx(r.post_pulse_trace.front().cos_theta).epsilon(1e-12));
  }

  TEST_CASE("integrator is fourth order") {
    const auto p = designed(2, 2, 2, Branch::positive);
    auto run = [&](double dt) {
      PropagationConfig c;
      c.dt = dt;
      return propagate({2, 2, 2}, p, c, kCh3i).final_packet;
    };
    const double period = 2 * std::numbers::pi / p.omega0;
    const auto reference = run(period / 640);
    const double coarse = amplitude_distance(run(period / 20), reference);
    const double fine = amplitude_distance(run(period / 40), reference);
    MESSAGE("error ratio per halving: " << coarse / fine);
    CHECK(coarse / fine >= 12.0);
    CHECK(coarse / fine <= 20.0);
  }

  TEST_CASE("propagation is deterministic") {
    const auto p = designed(3, -1, 2, Branch::negative);
    const auto a = propagate({3, -1, 2}, p, {}, kCh3i);
    const auto b = propagate({3, -1, 2}, p, {}, kCh3i);
    CHECK(a.final_packet.amplitudes == b.final_packet.amplitudes);
    CHECK(a.max_orientation == b.max_orientation);
  }

  TEST_CASE("Rabi populations for a resonant pulse") {
    for (double theta : {std::numbers::pi / 8, std::numbers::pi / 4}) {
      const auto [p0, p1] = rabi_oracle_check(0, 0, 0, theta, kCh3i);
      CHECK(p0 == Approx(std::cos(theta) * std::cos(theta)).epsilon(1e-3));
      CHECK(p1 == Approx(std::sin(theta) * std::sin(theta)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(rabi_oracle_check(1, 2, 0, 1.0, kCh3i), DomainError);
  }

  TEST_CASE("strong broadband pulse exhausts a small basis") {
    auto p = apply_perturbation(designed(0, 0, 0, Branch::positive, 0.05), 0.0, 100.0);
    PropagationConfig c;
    c.jmax_buffer = 5;
    CHECK_THROWS_AS(propagate({0, 0, 0}, p, c, kCh3i), TruncationError);
  }

  TEST_CASE("invalid inputs") {
    const auto p = designed(0, 0, 0, Branch::positive);
    CHECK_THROWS_AS(propagate({1, 2, 0}, p, {}, kCh3i), DomainError);
    auto bad = p;
    bad.t_end = p.tau;
    CHECK_THROWS_AS(propagate({0, 0, 0}, bad, {}, kCh3i), DomainError);
  }

  TEST_CASE("horizon checks") {
    WavePacket packet{Subspace(0, 0, 5), std::vector<std::complex<double>>(6), 0.0, Representation::schrodinger};
    packet.amplitudes[0] = 1.0;
    CHECK_THROWS_AS(field_free_trace(packet, 0.0, 10, kCh3i, true), HorizonError);
    CHECK_THROWS_AS(max_orientation({}, 1.0), HorizonError);
    const auto trace = field_free_trace(packet, 10.0, 11, kCh3i, true);
    CHECK_THROWS_AS(max_orientation(trace, 5.0), HorizonError);
    CHECK_NOTHROW(max_orientation(trace, 3.0));
  }

  TEST_CASE("parabolic refinement recovers a sampled peak") {
    Trace trace;
    const double period = 10.0;
    for (int i = 0; i <= 60; ++i) {
      const double t = i * 0.53;
      trace.push_back({t, 0.3 + 0.4 * std::cos(2 * std::numbers::pi * (t - 7.1) / period)});
    }
    const auto ext = max_orientation(trace, period);
    CHECK(ext.max == Approx(0.7).epsilon(1e-4));
    CHECK(ext.min == Approx(-0.1).epsilon(1e-3));
    CHECK(std::remainder(ext.t_at_max - 7.1, period) == Approx(0.0).epsilon(1e-2));
  }
}
