#include "bracketflow/rng.hpp"

#include <cmath>
#include <numbers>

#include "bracketflow/norms.hpp"

namespace bracketflow {

double Rng::normal() {
  double u1 = uniform();
  if (u1 == 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

CouplingMatrix random_banded_coupling(Rng& rng, const Lattice& lat, int range,
                                      Symmetry sym, double target_norm) {
  const int n = lat.n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (lat.distance(i, j) > range) continue;
      if (i == j) {
        if (sym == Symmetry::Symmetric) m(i, i) = rng.uniform(-1.0, 1.0);
        continue;
      }
      const double x = rng.uniform(-1.0, 1.0);
      m(i, j) = x;
      m(j, i) = sym == Symmetry::Antisymmetric ? -x : x;
    }
  }
  if (target_norm > 0.0) {
    const double nrm = operator_norm(m);
    if (nrm > 0.0) m *= target_norm / nrm;
  }
  return CouplingMatrix(std::move(m), sym);
}

}  // namespace bracketflow
