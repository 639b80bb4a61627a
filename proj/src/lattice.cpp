#include "bracketflow/lattice.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bracketflow {

int Lattice::distance(int i, int j) const {
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw std::out_of_range("Lattice::distance: site index out of range");
  const int d = std::abs(positions[i] - positions[j]);
  if (geometry == Geometry::ChainPeriodic) return std::min(d, n - d);
  return d;
}

int Lattice::diameter() const {
  if (n < 1) return 0;
  return geometry == Geometry::ChainPeriodic ? n / 2 : n - 1;
}

Lattice build_chain(int n, Geometry geometry) {
  if (n < 2) throw std::invalid_argument("build_chain: need at least two sites");
  Lattice lat;
  lat.n = n;
  lat.geometry = geometry;
  lat.positions.resize(n);
  for (int i = 0; i < n; ++i) lat.positions[i] = i;
  return lat;
}

const char* to_string(Geometry g) {
  return g == Geometry::ChainOpen ? "chain-open" : "chain-periodic";
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "chain-open") return Geometry::ChainOpen;
  if (s == "chain-periodic") return Geometry::ChainPeriodic;
  throw std::invalid_argument("unknown geometry: " + s);
}

}  // namespace bracketflow
