#pragma once

#include <string>

#include "tuckergrid/molecule.hpp"

namespace tuckergrid {

inline constexpr double kBohrPerAngstrom = 1.8897259886;

/// XYZ-style geometry: atom count line, unit line ("angstrom" or "bohr",
/// possibly inside a longer comment), then "symbol x y z" rows. Coordinates
/// are converted to bohr. Closed shell is enforced (even electron count),
/// except that a bare single electron yields the one-orbital system used by
/// the single-electron solver path.
Molecule parse_geometry(const std::string& path);
Molecule parse_geometry_text(const std::string& text);

/// Z for an element symbol (H..Kr); throws on unknown symbols.
double element_charge(const std::string& symbol);

}  // namespace tuckergrid
