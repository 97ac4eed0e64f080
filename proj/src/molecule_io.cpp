#include "symtop/molecule_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>

#include "symtop/errors.hpp"
#include "symtop/keyvalue.hpp"

namespace symtop {
namespace {

double parse_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("molecule key '" + key + "' has non-numeric value '" + text + "'");
  }
  return value;
}

}  // namespace

RotorConstants read_molecule(std::istream& in) {
  const auto doc = KeyValueDocument::parse(in);
  const std::string section = doc.has_section("molecule") ? "molecule" : "";

  auto require = [&](const char* key) {
    const auto value = doc.find(section, key);
    if (!value) throw ConfigError(std::string("molecule file is missing key '") + key + "'");
    return parse_number(key, *value);
  };

  RotorConstants c;
  c.A = require("A_cm1");
  c.C = require("C_cm1");
  c.DJ = require("DJ_cm1");
  c.DJK = require("DJK_cm1");
  c.DK = require("DK_cm1");
  c.mu0 = require("mu0_debye");
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid molecule constants: ") + e.what());
  }
  return c;
}

RotorConstants load_molecule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open molecule file '" + path + "'");
  return read_molecule(in);
}

RotorConstants resolve_molecule(const std::string& name_or_path) {
  if (name_or_path == "ch3i") return RotorConstants::ch3i();
  return load_molecule(name_or_path);
}

void write_molecule(std::ostream& out, const RotorConstants& c) {
  const std::array<std::pair<const char*, double>, 6> rows{{
      {"A_cm1", c.A}, {"C_cm1", c.C}, {"DJ_cm1", c.DJ},
      {"DJK_cm1", c.DJK}, {"DK_cm1", c.DK}, {"mu0_debye", c.mu0},
  }};
  char buf[64];
  for (const auto& [key, value] : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << key << " = " << buf << '\n';
  }
}

}  // namespace symtop
