#include "symtop/units.hpp"

#include <array>
#include <string>

#include "symtop/errors.hpp"

namespace symtop::units {
namespace {

enum class Dimension { Energy, Time };

struct UnitInfo {
  Unit unit;
  std::string_view name;
  Dimension dimension;
  double to_base;  // factor into rad/ps or ps
};

constexpr std::array<UnitInfo, 9> kUnits{{
    {Unit::InverseCentimeter, "cm-1", Dimension::Energy, kCm1ToRadPerPs},
    {Unit::RadianPerPicosecond, "rad/ps", Dimension::Energy, 1.0},
    {Unit::RadianPerSecond, "rad/s", Dimension::Energy, 1e-12},
    {Unit::Hertz, "Hz", Dimension::Energy, 2.0 * std::numbers::pi * 1e-12},
    {Unit::Gigahertz, "GHz", Dimension::Energy, 2.0 * std::numbers::pi * 1e-3},
    {Unit::DebyeVoltPerMeter, "D*V/m", Dimension::Energy, kDebyeFieldToRadPerPs},
    {Unit::Second, "s", Dimension::Time, 1e12},
    {Unit::Nanosecond, "ns", Dimension::Time, 1e3},
    {Unit::Picosecond, "ps", Dimension::Time, 1.0},
}};

const UnitInfo& info(Unit unit) {
  for (const auto& u : kUnits) {
    if (u.unit == unit) return u;
  }
  throw ConfigError("unknown unit enumerator");
}

}  // namespace

Unit parse_unit(std::string_view name) {
  for (const auto& u : kUnits) {
    if (u.name == name) return u.unit;
  }
  if (name == "cm^-1" || name == "1/cm") return Unit::InverseCentimeter;
  throw ConfigError("unknown unit '" + std::string(name) + "'");
}

std::string_view unit_name(Unit unit) { return info(unit).name; }

double convert(double value, Unit from, Unit to) {
  const auto& a = info(from);
  const auto& b = info(to);
  if (a.dimension != b.dimension) {
    throw ConfigError("cannot convert " + std::string(a.name) + " to " + std::string(b.name));
  }
  if (from == to) return value;
  return value * (a.to_base / b.to_base);
}

}  // namespace symtop::units
