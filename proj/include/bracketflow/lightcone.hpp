#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bracketflow/coupling.hpp"
#include "bracketflow/lattice.hpp"
#include "bracketflow/ode.hpp"

namespace bracketflow {

// m-th Taylor term of exp(2*tau*h): (2*tau)^m h^m / m!.  Built by the stable
// iteration t_m = t_{m-1} * h * (2*tau/m); no factorials are ever formed.
// Returned raw because powers of an antisymmetric matrix alternate class.
Eigen::MatrixXd imaginary_time_term(const CouplingMatrix& h, double tau, int m);

// Operator norms of the terms m = 0..m_max.  h must be antisymmetric; each
// value is bounded by (2*tau*||h||)^m / m!, and since an antisymmetric matrix
// is normal the bound is attained up to roundoff.
std::vector<double> imaginary_time_term_norms(const CouplingMatrix& h,
                                              double tau, int m_max);

inline constexpr double kLightconeTolerance = 1e-7;

// Exponential light-cone certificate.  scales holds R_k = (2^{k+1} - 1) R for
// k = 0..k_max; measured(k, j) is a certified upper estimate of the coupling
// strength of h(B_j) at distance R_k, bound(k, j) = J (8 J^2 B_j)^k / k!.
struct LightconeReport {
  int R = 0;
  double J = 0.0;
  std::vector<int> scales;
  std::vector<double> b_values;
  Eigen::MatrixXd measured;
  Eigen::MatrixXd bound;
  bool passed = false;
};

// Integrates the flow of h0 under v across B_list (nonnegative, ascending)
// and checks measured <= bound + kLightconeTolerance at every scale.  A bound
// violation yields passed = false, not an exception; integrator failures
// propagate.  k_max must keep R_{k_max} below the lattice diameter.
LightconeReport verify_lemma1(const CouplingMatrix& h0, const CouplingMatrix& v,
                              const Lattice& lat,
                              const std::vector<double>& B_list, int k_max,
                              const IntegratorConfig& cfg = {});

// Rows `k,R_k,B,measured,bound,pass`, one per (scale, B) cell, %.17g reals.
std::string to_csv(const LightconeReport& report);

}  // namespace bracketflow
