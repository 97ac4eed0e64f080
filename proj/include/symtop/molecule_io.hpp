#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "symtop/rotor.hpp"

namespace symtop {

/// Reads A_cm1, C_cm1, DJ_cm1, DJK_cm1, DK_cm1 and mu0_debye. When the file has
/// a [molecule] section only that section is read, otherwise the unsectioned
/// keys. The result is validated.
RotorConstants read_molecule(std::istream& in);
RotorConstants load_molecule(const std::string& path);

/// "ch3i" selects the bundled preset; anything else is treated as a file path.
RotorConstants resolve_molecule(const std::string& name_or_path);

/// Writes the six keys with round-trip precision, without a section header.
void write_molecule(std::ostream& out, const RotorConstants& constants);

}  // namespace symtop
