#pragma once

#include <map>
#include <string>
#include <vector>

#include "bracketflow/ode.hpp"

namespace bracketflow {

// Tabulated terms of a divergence-model series at one parameter point.
// Values are stored linearly, or as natural logs when the tail overflows
// double range (log_scale).  `damping_exponent` is applied lazily on read:
// coefficient(k) returns stored * exp(-damping_exponent), so damping and
// undamping round-trip bitwise on the stored data.
struct SeriesTable {
  std::string name;
  std::map<std::string, double> params;
  int k_begin = 0;
  std::vector<double> values;
  bool log_scale = false;
  double damping_exponent = 0.0;

  int k_end() const { return k_begin + static_cast<int>(values.size()) - 1; }
  bool has(int k) const { return k >= k_begin && k <= k_end(); }
  // Linear term value (exponentiates in log mode; may overflow to inf).
  double coefficient(int k) const;
  // Natural log of the term value (-inf for zero entries in linear mode).
  double log_coefficient(int k) const;
};

// J_k(B) = (J^2 |B|)^k ((k-1)!)^2 / k!  ==  (J^2 |B|)^k (k-1)! / k.
// Rejects k = 0 (the factorial of -1 is undefined; by convention the
// zeroth term is 1).  Overflows to inf near k ~ 170 at unit parameters;
// use the log variant beyond.
double jk_closed_form(double J, double B, int k);
// log J_k(B); requires J != 0 and B != 0 (the value would be zero).
double jk_closed_form_log(double J, double B, int k);

// The k = 0 -> 1 step of the term recursion carries a factor k^2 that
// vanishes, yet the closed form is nonzero at k = 1.  KSquared runs the
// literal k^2 rule with J_1 seeded from the closed form; MaxK1Squared
// replaces the factor with max(k,1)^2 and runs unseeded from J_0 = 1.
// Both produce identical tables for k >= 1.
enum class JkConvention { KSquared, MaxK1Squared };

// Tabulates J_k(B) for k = 0..k_max by the term recursion
//   J_{k+1}(B) = integral_0^B J_k J^2 k^2 |dB'|
// (each integral is an exact monomial in B).  Switches the table to log
// scale when any entry would leave double range.
SeriesTable jk_recursive(double J, double B, int k_max, JkConvention conv);

// delta_tilde_k(B) = (eps q J^2 B)^k / k.  Rejects k = 0.
double delta_tilde_closed_form(double epsilon, double q, double J, double B,
                               int k);

// Closed-form table of delta_tilde_k for k = 1..k_max at fixed B.
SeriesTable delta_tilde_table(double epsilon, double q, double J, double B,
                              int k_max);

// Integrates the damping-removed cascade
//   d/dB delta_tilde_{k+1} = eps k q J^2 delta_tilde_k,   k >= 1,
// with the k = 1 term seeded by its exact slope eps q J^2 (the k = 0 step
// of the recursion carries a vanishing factor), all terms zero at B = 0.
// Returns the table at B_grid.back(); the grid must ascend from 0.
SeriesTable delta_recursive(
    double epsilon, double q, double J, const std::vector<double>& B_grid,
    int k_max,
    const IntegratorConfig& cfg = {OdeMethod::Rk45Adaptive, 0.0, 1e-12,
                                   1e-30});

// Applies / removes the exponential damping view delta = exp(-x) delta~.
// Stored values are untouched; only the lazy exponent changes.
SeriesTable damp(SeriesTable table, double exponent);
SeriesTable undamp(SeriesTable table);

// Ratio-test radius of convergence with Richardson extrapolation: for
// ratios rho_k = c_k / c_{k+1} the sequence k rho_k - (k-1) rho_{k-1}
// cancels the 1/k correction exactly; the estimate is the median over the
// last quartile of available k.  Negative extrapolants clamp to zero
// (ratios shrinking like 1/k mean a vanishing radius).
struct RadiusEstimate {
  double radius = 0.0;
  double ratio_median = 0.0;       // plain ratios over the same window
  int k_lo = 0, k_hi = 0;          // window of k used
  std::vector<double> richardson;  // extrapolants entering the median
};

// Requires at least 10 nonzero finite coefficients.
RadiusEstimate radius_estimate(const SeriesTable& table);

// CSV `k,coefficient` (or `k,log_coefficient` with a `# scale: log`
// header comment in log mode); params serialize separately as JSON.
std::string to_csv(const SeriesTable& table);
std::string params_json(const SeriesTable& table);

}  // namespace bracketflow
