#include <doctest.h>

#include <stdexcept>

#include "bracketflow/lattice.hpp"

using bracketflow::Geometry;
using bracketflow::Lattice;
using bracketflow::build_chain;

TEST_CASE("open chain uses the path metric") {
  const Lattice lat = build_chain(4, Geometry::ChainOpen);
  CHECK(lat.distance(0, 3) == 3);
  CHECK(lat.distance(2, 1) == 1);
  CHECK(lat.diameter() == 3);
}

TEST_CASE("periodic chain wraps") {
  const Lattice lat = build_chain(6, Geometry::ChainPeriodic);
  CHECK(lat.distance(0, 5) == 1);
  CHECK(lat.distance(0, 3) == 3);
  CHECK(lat.distance(1, 5) == 2);
  CHECK(lat.diameter() == 3);
}

TEST_CASE("two-site chain") {
  const Lattice lat = build_chain(2, Geometry::ChainOpen);
  CHECK(lat.distance(0, 1) == 1);
}

TEST_CASE("chains below two sites are rejected") {
  CHECK_THROWS_AS(build_chain(1, Geometry::ChainOpen), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(0, Geometry::ChainPeriodic),
                  std::invalid_argument);
}

TEST_CASE("out-of-range site indices are rejected") {
  const Lattice lat = build_chain(4, Geometry::ChainOpen);
  CHECK_THROWS_AS(lat.distance(0, 4), std::out_of_range);
  CHECK_THROWS_AS(lat.distance(-1, 2), std::out_of_range);
}

TEST_CASE("metric axioms hold exhaustively") {
  for (const auto geometry : {Geometry::ChainOpen, Geometry::ChainPeriodic}) {
    for (const int n : {2, 3, 8, 64}) {
      const Lattice lat = build_chain(n, geometry);
      for (int i = 0; i < n; ++i) {
        CHECK(lat.distance(i, i) == 0);
        for (int j = 0; j < n; ++j) {
          CHECK(lat.distance(i, j) == lat.distance(j, i));
          for (int k = 0; k < n; ++k) {
            CHECK(lat.distance(i, k) <=
                  lat.distance(i, j) + lat.distance(j, k));
          }
        }
      }
    }
  }
}
