#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bracketflow/coupling.hpp"
#include "bracketflow/lattice.hpp"
#include "bracketflow/ode.hpp"

namespace bracketflow {

// Alternating-bond chain: bond (2k, 2k+1) carries 1 + t, bond (2k+1, 2k+2)
// carries 1 - t, every other entry zero.  n must be even; a ring needs n >= 4
// so the two bond flavours stay distinct.
CouplingMatrix build_dimer_h(double t, int n, Geometry geometry);

// 2x2 momentum blocks of the chain, as coefficients (a, b) of an
// anticommuting pair (sigma_w, sigma_z).  block_hamiltonian is the reduced
// block (t, 2 cos theta) in which the bond alternation enters as a
// momentum-independent transverse coupling; dimer_momentum_block is the exact
// reduction (2 t sin theta, 2 cos theta) of build_dimer_h on the plane-wave
// pair (theta, theta + pi), which the reconstruction below inverts exactly.
Eigen::Vector2d block_hamiltonian(double t, double theta);
Eigen::Vector2d dimer_momentum_block(double t, double theta);

struct BlockState {
  double theta = 0.0;
  double a = 0.0;  // transverse coefficient
  double b = 0.0;  // sigma_z coefficient
};

// Integrates the 2x2 restriction of the bracket flow from B = 0 to B:
// a' = 16 w b, b' = -16 w a with w = alpha b - a beta (derivation in the
// source).  Conserves a^2 + b^2; v_block = (alpha, beta).
BlockState block_flow(const BlockState& initial, const Eigen::Vector2d& v_block,
                      double B, const IntegratorConfig& cfg = {});

// Evolves every momentum block of the n-site ring to B and transforms back to
// an n x n real-space coupling matrix.  theta_grid_size must equal n (one
// block per momentum pair); at B = 0 this reproduces build_dimer_h(t, n)
// entrywise to 1e-9.
CouplingMatrix real_space_reconstruct(double t, int n, double B,
                                      int theta_grid_size,
                                      const IntegratorConfig& cfg = {});

// Crossover angle: the theta in (0, pi/2) at which the block evolved to B is
// equidistant from +v_block and -v_block, located by bisection.  Requires
// t != 0 (otherwise every block already sits on v).
double theta_star(double t, double B, const IntegratorConfig& cfg = {});

enum class FitStatus { Ok, BelowFloor, TooFewPoints, Degenerate };

// Real-space decay length xi(B) = -1 / slope of log strength-at-distance
// versus distance, least-squares fitted over the window where the profile
// lies inside fit_window; entries that never enter the window carry a
// non-Ok status and xi = 0.  slope/intercept/r_squared describe the linear
// fit of log xi against B over the Ok entries (NaN when fewer than two).
struct GrowthReport {
  std::vector<double> b_values;
  std::vector<double> xi;
  std::vector<double> crossover;  // theta*(B)
  std::vector<FitStatus> status;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

GrowthReport measure_growth(double t, int n, const std::vector<double>& B_list,
                            std::pair<double, double> fit_window = {1e-10,
                                                                    1e-2},
                            const IntegratorConfig& cfg = {});

// Rows `B,xi,theta_star,abs_cos_theta_star`, %.17g reals.
std::string to_csv(const GrowthReport& report);
// {"slope", "intercept", "r_squared", "fit_ok": per-B flags}
std::string summary_json(const GrowthReport& report);

}  // namespace bracketflow
