#pragma once

#include <Eigen/Dense>

#include "bracketflow/coupling.hpp"

namespace bracketflow {

// [a, b] = ab - ba.
template <class MA, class MB>
auto commutator(const MA& a, const MB& b) {
  return (a * b - b * a).eval();
}

// scale * [[v, h], h], evaluated as (c h - h c) with c = v h - h v.
template <class MV, class MH>
auto double_bracket(const MV& v, const MH& h, double scale = 1.0) {
  auto c = commutator(v, h);
  return (scale * (c * h - h * c)).eval();
}

// The flow generator scale*[[v,h],h] on tagged matrices; the literal triple
// product, no projection.  When v and h share a symmetry class the result is
// in that class up to roundoff.
Eigen::MatrixXd double_bracket_rhs(const CouplingMatrix& v,
                                   const CouplingMatrix& h, double scale);

}  // namespace bracketflow
