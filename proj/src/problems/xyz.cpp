#include "frankopt/problems/xyz.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace frankopt {

void write_xyz(std::ostream& out, const AtomicCluster& cluster, const std::string& comment,
               const std::string& symbol) {
  if (comment.find('\n') != std::string::npos) throw std::invalid_argument("xyz: comment must be one line");
  out << cluster.size() << '\n' << comment << '\n';
  for (std::size_t a = 0; a < cluster.size(); ++a) {
    out << fmt::format("{} {:.17g} {:.17g} {:.17g}\n", symbol, cluster.positions[3 * a],
                       cluster.positions[3 * a + 1], cluster.positions[3 * a + 2]);
  }
}

AtomicCluster read_xyz(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("xyz: missing atom count");
  std::size_t n = 0;
  {
    std::istringstream head(line);
    if (!(head >> n) || n == 0) throw std::runtime_error("xyz line 1: bad atom count '" + line + "'");
  }
  if (!std::getline(in, line)) throw std::runtime_error("xyz: missing comment line");
  AtomicCluster c;
  c.positions.reserve(3 * n);
  for (std::size_t a = 0; a < n; ++a) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("xyz: expected " + std::to_string(n) + " atoms, found " + std::to_string(a));
    }
    std::istringstream row(line);
    std::string symbol;
    double x, y, z;
    if (!(row >> symbol >> x >> y >> z)) {
      throw std::runtime_error("xyz line " + std::to_string(a + 3) + ": expected 'symbol x y z'");
    }
    c.positions.insert(c.positions.end(), {x, y, z});
  }
  return c;
}

}  // namespace frankopt
