#pragma once

#include <Eigen/Dense>
#include <string>

#include "bracketflow/lattice.hpp"

namespace bracketflow {

// Symmetry class of a coupling matrix.  Antisymmetric matrices model
// quadratic fermion generators; symmetric ones model hopping Hamiltonians.
// The double-bracket flow preserves whichever class both inputs share.
enum class Symmetry { Antisymmetric, Symmetric };

// Real n x n single-particle coupling matrix tagged with its symmetry class.
// Construction validates finiteness and the class exactly; in-class algebra
// (negation-symmetric sums, projected products) keeps the tag truthful.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  CouplingMatrix(Eigen::MatrixXd entries, Symmetry symmetry);

  int n() const { return static_cast<int>(entries_.rows()); }
  Symmetry symmetry() const { return symmetry_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  Eigen::MatrixXd& mutable_entries() { return entries_; }

  // Throws std::invalid_argument on NaN/Inf, non-square shape, or an entry
  // pattern that breaks the declared symmetry class.
  void validate() const;

 private:
  Eigen::MatrixXd entries_;
  Symmetry symmetry_ = Symmetry::Antisymmetric;
};

// Smallest R such that entries vanish beyond graph distance R; 0 for a
// diagonal (or empty) matrix.
int coupling_range(const CouplingMatrix& m, const Lattice& lat);

// Symmetry-class projection: exact antisymmetrisation or symmetrisation.
Eigen::MatrixXd project_to_class(const Eigen::MatrixXd& m, Symmetry sym);

const char* to_string(Symmetry s);
Symmetry symmetry_from_string(const std::string& s);

// JSON schema: {"n": int, "symmetry": "antisymmetric"|"symmetric",
//               "entries": [n*n reals, row-major]}.
std::string to_json(const CouplingMatrix& m);
CouplingMatrix coupling_from_json(const std::string& text);

}  // namespace bracketflow
