#pragma once

#include <cstdint>
#include <random>

#include "bracketflow/coupling.hpp"
#include "bracketflow/lattice.hpp"

namespace bracketflow {

// mt19937_64 with explicit output scalings.  The standard's distribution
// objects are implementation-defined, so uniform and normal variates are
// derived here directly from the raw 64-bit stream: identical seeds give
// identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one fresh pair per call, cosine branch.
  double normal();

 private:
  std::mt19937_64 engine_;
};

// Random coupling with entries drawn uniformly from [-1, 1] on every pair
// within graph distance `range` (diagonal included only for the symmetric
// class), then rescaled to the requested operator norm (skip with
// target_norm <= 0, or when the draw is identically zero).  Draw order is
// row-major, so a seed pins the instance exactly.
CouplingMatrix random_banded_coupling(Rng& rng, const Lattice& lat, int range,
                                      Symmetry sym, double target_norm = 1.0);

}  // namespace bracketflow
