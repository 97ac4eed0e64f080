#pragma once

// Internal unit system: energies are angular frequencies in rad/ps (hbar = 1),
// times are picoseconds and electric fields are V/m.

#include <numbers>
#include <string_view>

namespace symtop::units {

inline constexpr double kSpeedOfLightCmPerPs = 2.99792458e-2;
inline constexpr double kHbarJouleSecond = 1.054571817e-34;
inline constexpr double kDebyeCoulombMeter = 3.33564095198152e-30;

/// rad/ps per cm^-1.
inline constexpr double kCm1ToRadPerPs = 2.0 * std::numbers::pi * kSpeedOfLightCmPerPs;
/// rad/ps per (Debye * V/m).
inline constexpr double kDebyeFieldToRadPerPs = kDebyeCoulombMeter / kHbarJouleSecond * 1e-12;

enum class Unit {
  // energy / angular frequency
  InverseCentimeter,
  RadianPerPicosecond,
  RadianPerSecond,
  Hertz,
  Gigahertz,
  DebyeVoltPerMeter,
  // time
  Second,
  Nanosecond,
  Picosecond,
};

/// Parses names such as "cm-1", "rad/ps", "GHz", "D*V/m", "ps".
/// Throws ConfigError for unknown names.
Unit parse_unit(std::string_view name);

std::string_view unit_name(Unit unit);

/// Converts between two units of the same dimension.
/// Throws ConfigError when the pair mixes energy and time.
double convert(double value, Unit from, Unit to);

inline constexpr double cm1_to_internal(double wavenumber) { return wavenumber * kCm1ToRadPerPs; }
inline constexpr double internal_to_cm1(double omega) { return omega / kCm1ToRadPerPs; }

}  // namespace symtop::units
