#pragma once

#include <vector>
#include <string>

namespace bracketflow {

enum class Geometry { ChainOpen, ChainPeriodic };

// One-dimensional site graph with an integer metric.  Chains are the only
// geometry family; positions are the site indices themselves, kept explicit
// so callers can reason about coordinates rather than array offsets.
struct Lattice {
  int n = 0;
  Geometry geometry = Geometry::ChainOpen;
  std::vector<int> positions;

  // Graph distance between sites.  Periodic chains wrap: min(|i-j|, n-|i-j|).
  int distance(int i, int j) const;

  // Largest distance realised between any two sites.
  int diameter() const;
};

// n >= 2 required; a single site has no pair geometry to speak of.
Lattice build_chain(int n, Geometry geometry);

const char* to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

}  // namespace bracketflow
