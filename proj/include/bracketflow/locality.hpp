#pragma once

#include <vector>

#include "bracketflow/coupling.hpp"
#include "bracketflow/norms.hpp"

namespace bracketflow {

// Certified bracket around the locality pseudonorm
//
//   |m|_r = max { |<psi, m phi>| : unit psi, phi with
//                 dist(supp psi, supp phi) > r }.
//
// This is a pseudonorm, not a norm: it vanishes on any matrix supported
// within distance r.  Neither side is computed exactly; instead we report
//   lower  = max over maximal disjoint interval pairs (A, B) with
//            dist(A, B) > r of sigma_max(m[A, B])   (achievable, so a bound
//            from below), and
//   upper  = operator norm of the masked matrix that keeps only entries at
//            distance > r (every admissible (psi, phi) pair sees exactly
//            that matrix, so a bound from above).

// Copy of m with entries at distance <= r zeroed out.
Eigen::MatrixXd masked_matrix(const Eigen::MatrixXd& m, const Lattice& lat,
                              double r);

// The pseudonorm is defined for arbitrary matrices (products of tagged
// matrices generally leave both symmetry classes), hence the raw overloads.
double locality_lower(const Eigen::MatrixXd& m, const Lattice& lat, double r);
double locality_upper(const Eigen::MatrixXd& m, const Lattice& lat, double r);
double locality_lower(const CouplingMatrix& m, const Lattice& lat, double r);
double locality_upper(const CouplingMatrix& m, const Lattice& lat, double r);

struct LocalityProfile {
  std::vector<double> radii;  // strictly ascending, non-negative
  std::vector<double> lower;
  std::vector<double> upper;
  double B = 0.0;  // flow parameter the profile was measured at
};

// Evaluates both estimators on the radius grid.  The true pseudonorm is
// non-increasing in r, so the profile is clamped monotone: the lower curve by
// shrinking (still achievable), the upper curve by the running minimum (a
// bound at a smaller radius bounds every larger one).
LocalityProfile locality_profile(const CouplingMatrix& m, const Lattice& lat,
                                 std::vector<double> radii, double B = 0.0);

}  // namespace bracketflow
