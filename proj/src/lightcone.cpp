#include "bracketflow/lightcone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bracketflow/flow.hpp"
#include "bracketflow/format.hpp"
#include "bracketflow/locality.hpp"
#include "bracketflow/norms.hpp"

namespace bracketflow {

Eigen::MatrixXd imaginary_time_term(const CouplingMatrix& h, double tau,
                                    int m) {
  if (tau < 0.0) throw std::invalid_argument("imaginary_time_term: tau < 0");
  if (m < 0) throw std::invalid_argument("imaginary_time_term: m < 0");
  const int n = h.n();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j <= m; ++j) term = (term * h.entries() * (2.0 * tau / j)).eval();
  return term;
}

std::vector<double> imaginary_time_term_norms(const CouplingMatrix& h,
                                              double tau, int m_max) {
  if (h.symmetry() != Symmetry::Antisymmetric)
    throw std::invalid_argument("imaginary_time_term_norms: h must be antisymmetric");
  if (tau < 0.0) throw std::invalid_argument("imaginary_time_term_norms: tau < 0");
  if (m_max < 1) throw std::invalid_argument("imaginary_time_term_norms: m_max < 1");
  const int n = h.n();
  std::vector<double> norms;
  norms.reserve(m_max + 1);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  norms.push_back(1.0);
  for (int m = 1; m <= m_max; ++m) {
    term = (term * h.entries() * (2.0 * tau / m)).eval();
    norms.push_back(operator_norm(term));
  }
  return norms;
}

LightconeReport verify_lemma1(const CouplingMatrix& h0, const CouplingMatrix& v,
                              const Lattice& lat,
                              const std::vector<double>& B_list, int k_max,
                              const IntegratorConfig& cfg) {
  if (k_max < 0 || k_max > 60)
    throw std::invalid_argument("verify_lemma1: k_max out of range");
  if (B_list.empty()) throw std::invalid_argument("verify_lemma1: empty B_list");
  for (size_t j = 0; j < B_list.size(); ++j) {
    if (!(B_list[j] >= 0.0))
      throw std::invalid_argument("verify_lemma1: B values must be nonnegative");
    if (j > 0 && !(B_list[j] > B_list[j - 1]))
      throw std::invalid_argument("verify_lemma1: B_list must ascend");
  }

  LightconeReport rep;
  rep.R = std::max(coupling_range(h0, lat), coupling_range(v, lat));
  rep.J = std::max(operator_norm(h0), operator_norm(v));
  rep.b_values = B_list;

  rep.scales.reserve(k_max + 1);
  long long rk = rep.R;
  for (int k = 0; k <= k_max; ++k) {
    // Recursion R_{k+1} = 2 R_k + R telescopes to (2^{k+1} - 1) R; keep both
    // forms and insist they agree so the scale table can never drift.
    if (rk != ((2LL << k) - 1) * rep.R)
      throw std::logic_error("verify_lemma1: scale recursion mismatch");
    if (rk > lat.diameter())
      throw std::invalid_argument("verify_lemma1: R_k exceeds lattice diameter");
    rep.scales.push_back(static_cast<int>(rk));
    rk = 2 * rk + rep.R;
  }

  std::vector<double> grid = B_list;
  if (grid.front() > 0.0) grid.insert(grid.begin(), 0.0);
  const auto traj = integrate_flow(h0, v, grid, cfg);
  const size_t skip = grid.size() - B_list.size();

  const int nk = k_max + 1;
  const int nb = static_cast<int>(B_list.size());
  rep.measured.resize(nk, nb);
  rep.bound.resize(nk, nb);
  rep.passed = true;
  for (int j = 0; j < nb; ++j) {
    const CouplingMatrix& hb = traj.snapshots[skip + j];
    // The masked-matrix estimate is a Schur multiplier of h and can sit above
    // ||h||, while the strength itself never does and only falls with
    // distance; clamp by both so the column stays a certified upper bound.
    double running = operator_norm(hb);
    double term = rep.J;
    for (int k = 0; k < nk; ++k) {
      running = std::min(running, locality_upper(hb, lat, rep.scales[k]));
      rep.measured(k, j) = running;
      rep.bound(k, j) = term;
      if (!(running <= term + kLightconeTolerance)) rep.passed = false;
      term *= 8.0 * rep.J * rep.J * B_list[j] / (k + 1);
    }
  }
  return rep;
}

std::string to_csv(const LightconeReport& rep) {
  std::string out = "k,R_k,B,measured,bound,pass\n";
  for (int k = 0; k < rep.measured.rows(); ++k)
    for (int j = 0; j < rep.measured.cols(); ++j) {
      const bool ok =
          rep.measured(k, j) <= rep.bound(k, j) + kLightconeTolerance;
      out += std::to_string(k) + ',' + std::to_string(rep.scales[k]) + ',' +
             format_g17(rep.b_values[j]) + ',' + format_g17(rep.measured(k, j)) +
             ',' + format_g17(rep.bound(k, j)) + ',' + (ok ? '1' : '0') + '\n';
    }
  return out;
}

}  // namespace bracketflow
