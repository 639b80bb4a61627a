#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bracketflow/ode.hpp"
#include "bracketflow/pauli.hpp"

namespace bracketflow {

// Trajectory of the many-body flow dH/dB = [[V, H(B)], H(B)], integrated in
// the dense 2^n representation with snapshots converted back to string
// form.  potential[i] = Tr((H(B_i) - V)^2), the quantity the flow descends.
struct SpinTrajectory {
  std::vector<double> B_grid;
  std::vector<PauliPolynomial> snapshots;
  std::vector<double> potential;
  IntegrationStats stats;
};

// Integrates the flow across an ascending grid starting at 0.  H0 and V
// must be Hermitian polynomials on the same n <= 12 sites.  Snapshot
// coefficients with |c| <= snapshot_drop_tol are discarded on conversion
// (pass 0 to keep everything but exact zeros).  A real H0/V pair runs in
// real arithmetic; a diagonal V uses the elementwise commutator
// [V, H]_ab = (V_a - V_b) H_ab, which costs one product per evaluation.
SpinTrajectory dense_flow(const PauliPolynomial& H0, const PauliPolynomial& V,
                          std::vector<double> B_grid,
                          const IntegratorConfig& cfg = {},
                          double snapshot_drop_tol = 1e-12);

// Raised when the power series would store more strings than its budget
// allows; k_reached() names the last fully computed order.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, int k_reached)
      : std::runtime_error(what + " after order " + std::to_string(k_reached)),
        k_reached_(k_reached) {}
  int k_reached() const { return k_reached_; }

 private:
  int k_reached_;
};

inline constexpr std::size_t kStringBudget = 1'000'000;

// Orders H_k(B) of the expansion H(B) = sum_k H_k(B) of the flow around
// B = 0, for k = 0..k_max.  Each order is the exact monomial B^k h_k with
// (k+1) h_{k+1} = sum_{l=0}^{k} [[V, h_{k-l}], h_l] and h_0 = H, evaluated
// at the given B; no quadrature is involved, so the returned coefficients
// are exact up to string-arithmetic roundoff.
std::vector<PauliPolynomial> power_series_terms(
    const PauliPolynomial& H, const PauliPolynomial& V, int k_max, double B,
    std::size_t budget = kStringBudget);

// Finite-size scan of H(B) = flow of V + epsilon * Delta, where Delta is
// the pattern summed over every ring translate.  For each size the final
// snapshot is reduced to (a) the coefficient of every string supported in a
// `window`-site block at the chain center, keyed by the window-relative
// symbol text, and (b) the total squared coefficient weight at each ring
// diameter.  differences[i] holds |coefficient difference| between sizes[i]
// and sizes[i+1] per central label.  The table reports; it asserts nothing.
struct ConvergenceProbeReport {
  std::vector<int> sizes;
  int window = 0;
  std::vector<std::map<std::string, std::complex<double>>> central;
  std::vector<std::vector<double>> diameter_weight;  // [size index][diameter]
  std::vector<std::map<std::string, double>> differences;
};

ConvergenceProbeReport convergence_probe(const PauliPolynomial& pattern,
                                         double epsilon,
                                         const std::vector<int>& sizes,
                                         double B,
                                         const IntegratorConfig& cfg = {},
                                         int window = 4);

// Pattern summed over all n ring translates (sites taken mod n).
PauliPolynomial tile_pattern(const PauliPolynomial& pattern, int n_sites);

// CSV `size,string,coefficient_re,coefficient_im`, sizes in scan order,
// strings sorted within a size.
std::string central_csv(const ConvergenceProbeReport& rep);

// CSV `size,diameter,weight` with one row per diameter 0..n per size.
std::string weight_csv(const ConvergenceProbeReport& rep);

}  // namespace bracketflow
