#pragma once

#include <iosfwd>
#include <string>

#include "frankopt/problems/lennard_jones.hpp"

namespace frankopt {

/// Standard XYZ text: atom count, comment line, then "symbol x y z" per atom.
/// Coordinates are written with 17 significant digits so reading back is exact.
void write_xyz(std::ostream& out, const AtomicCluster& cluster, const std::string& comment = "",
               const std::string& symbol = "Ar");

/// Reads one frame; symbols are ignored. Throws std::runtime_error on
/// malformed input, naming the line.
AtomicCluster read_xyz(std::istream& in);

}  // namespace frankopt
