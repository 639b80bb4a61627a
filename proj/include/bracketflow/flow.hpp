#pragma once

#include <string>
#include <vector>

#include "bracketflow/bracket.hpp"
#include "bracketflow/coupling.hpp"
#include "bracketflow/ode.hpp"

namespace bracketflow {

// Relative operator-norm drift at which a trajectory is declared broken.
// Ten times the 1e-6 conservation tolerance the tests hold snapshots to.
inline constexpr double kNormDriftAbort = 1e-5;

struct FlowDiagnostics {
  IntegrationStats stats;
  double initial_norm = 0.0;
  double max_norm_drift = 0.0;  // max relative |norm(h(B)) - norm(h0)|
};

// Snapshots of h(B) on an ascending B grid starting at 0, with integrator
// diagnostics.  snapshots[0] is the initial matrix.
struct FlowTrajectory {
  std::vector<double> B_grid;
  std::vector<CouplingMatrix> snapshots;
  FlowDiagnostics diagnostics;
};

// Integrates dh/dB = 4[[v, h], h] and records h at every grid point.  The
// operator norm is monitored at each grid point; relative drift beyond
// kNormDriftAbort aborts with IntegrationError (norm conservation is exact
// for the true flow, so a breach means the integration failed).
FlowTrajectory integrate_flow(const CouplingMatrix& h0,
                              const CouplingMatrix& v,
                              std::vector<double> B_grid,
                              const IntegratorConfig& cfg = {});

// Squared Frobenius distance sum_ij (h-v)_ij^2.  Monotone along the flow
// with a class-dependent direction: non-increasing for the symmetric class,
// non-decreasing for the antisymmetric class (see flow_potential_signed).
double flow_potential(const CouplingMatrix& h, const CouplingMatrix& v);

// Tr((h-v)^2) with the matrix square, not the elementwise one.  Equals
// +/- flow_potential depending on class and is the quantity the flow
// descends in both classes: d/dB Tr((h-v)^2) = -8 ||[v,h]||_F^2 * sign,
// worked out in src/flow.cpp.
double flow_potential_signed(const CouplingMatrix& h, const CouplingMatrix& v);

// JSON: {"B_grid": [...], "snapshots": [coupling objects...],
//        "diagnostics": {...}}.
std::string to_json(const FlowTrajectory& t);

}  // namespace bracketflow
