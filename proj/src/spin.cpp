#include "bracketflow/spin.hpp"

#include <cmath>
#include <functional>
#include <utility>

#include "bracketflow/format.hpp"

namespace bracketflow {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

MatrixXcd to_complex(const MatrixXd& m) { return m.cast<std::complex<double>>(); }
const MatrixXcd& to_complex(const MatrixXcd& m) { return m; }

// One flow integration over either scalar field.  Both V,H Hermitian make
// W = [V,H] anti-Hermitian, so each commutator costs a single product:
// [V,H] = VH - (VH)^dagger and [W,H] = WH + (WH)^dagger.  The sum forms
// keep every stage exactly Hermitian, so the structure cannot drift.  A
// diagonal V replaces the first product by the elementwise Schur form
// [V,H]_ab = (V_a - V_b) H_ab.
template <class Mat>
IntegrationStats run_flow(
    const Mat& h0, const Mat& v, bool v_diagonal,
    const std::vector<double>& grid, const IntegratorConfig& cfg,
    const std::function<void(const MatrixXcd&)>& on_snapshot) {
  const long dim = h0.rows();
  Mat dgaps;
  if (v_diagonal) {
    // Hermitian V has a real diagonal; taking the real part pins the gap
    // matrix exactly antisymmetric, so W below is exactly anti-Hermitian.
    dgaps.resize(dim, dim);
    for (long i = 0; i < dim; ++i)
      for (long j = 0; j < dim; ++j)
        dgaps(i, j) = Eigen::numext::real(v(i, i)) - Eigen::numext::real(v(j, j));
  }
  Mat w(dim, dim), wh(dim, dim), whadj(dim, dim);
  auto rhs = [&](double, const Mat& y, Mat& dy) {
    if (v_diagonal) {
      w = dgaps.cwiseProduct(y);
    } else {
      wh.noalias() = v * y;
      whadj = wh.adjoint();
      w = wh - whadj;
    }
    wh.noalias() = w * y;
    whadj = wh.adjoint();
    dy = wh + whadj;
  };
  return integrate_grid(rhs, Mat(h0), grid, cfg,
                        [&](int, double, const Mat& y) { on_snapshot(to_complex(y)); });
}

}  // namespace

SpinTrajectory dense_flow(const PauliPolynomial& H0, const PauliPolynomial& V,
                          std::vector<double> B_grid,
                          const IntegratorConfig& cfg,
                          double snapshot_drop_tol) {
  if (H0.n_sites() != V.n_sites() || H0.n_sites() == 0)
    throw std::invalid_argument("dense_flow: n_sites mismatch");
  if (!is_hermitian(H0, 1e-12) || !is_hermitian(V, 1e-12))
    throw std::invalid_argument("dense_flow: H0 and V must be Hermitian");
  if (B_grid.empty() || B_grid.front() != 0.0)
    throw std::invalid_argument("dense_flow: B grid must start at 0");
  if (!(snapshot_drop_tol >= 0.0))
    throw std::invalid_argument("dense_flow: snapshot_drop_tol must be >= 0");

  const MatrixXcd h0c = to_dense(H0);  // enforces the dense site cap
  const MatrixXcd vc = to_dense(V);
  bool v_diagonal = true;
  for (const auto& [key, c] : V.terms())
    for (int j = 0; j < V.n_sites(); ++j) {
      const auto op = site_op_at(key, j);
      if (op == SiteOp::Lower || op == SiteOp::Raise) v_diagonal = false;
    }
  const bool real_path = h0c.imag().cwiseAbs().maxCoeff() == 0.0 &&
                         vc.imag().cwiseAbs().maxCoeff() == 0.0;

  SpinTrajectory out;
  out.B_grid = B_grid;
  const auto on_snapshot = [&](const MatrixXcd& y) {
    out.snapshots.push_back(from_dense(y, snapshot_drop_tol));
    out.potential.push_back((y - vc).squaredNorm());
  };
  if (real_path)
    out.stats = run_flow<MatrixXd>(h0c.real(), vc.real(), v_diagonal, B_grid,
                                   cfg, on_snapshot);
  else
    out.stats = run_flow<MatrixXcd>(h0c, vc, v_diagonal, B_grid, cfg,
                                    on_snapshot);
  return out;
}

std::vector<PauliPolynomial> power_series_terms(const PauliPolynomial& H,
                                                const PauliPolynomial& V,
                                                int k_max, double B,
                                                std::size_t budget) {
  if (H.n_sites() != V.n_sites() || H.n_sites() == 0)
    throw std::invalid_argument("power_series_terms: n_sites mismatch");
  if (k_max < 0)
    throw std::invalid_argument("power_series_terms: k_max must be >= 0");

  std::vector<PauliPolynomial> h{H};
  std::vector<PauliPolynomial> vh{commutator(V, H)};  // [V, h_j], reused
  std::size_t stored = H.term_count() + vh.front().term_count();
  for (int k = 0; k < k_max; ++k) {
    PauliPolynomial acc(H.n_sites());
    for (int l = 0; l <= k; ++l) {
      acc = acc + commutator(vh[static_cast<std::size_t>(k - l)],
                             h[static_cast<std::size_t>(l)]);
      if (acc.term_count() > budget)
        throw BudgetError("power_series_terms: string budget exhausted", k);
    }
    PauliPolynomial next = (1.0 / (k + 1)) * acc;
    PauliPolynomial vnext = commutator(V, next);
    stored += next.term_count() + vnext.term_count();
    if (stored > budget)
      throw BudgetError("power_series_terms: string budget exhausted", k);
    h.push_back(std::move(next));
    vh.push_back(std::move(vnext));
  }

  std::vector<PauliPolynomial> result;
  result.reserve(h.size());
  double bk = 1.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    result.push_back(std::complex<double>(bk) * h[k]);
    bk *= B;
  }
  return result;
}

PauliPolynomial tile_pattern(const PauliPolynomial& pattern, int n_sites) {
  if (pattern.n_sites() == 0 || pattern.n_sites() > n_sites)
    throw std::invalid_argument("tile_pattern: pattern wider than the ring");
  PauliPolynomial out(n_sites);
  for (int j = 0; j < n_sites; ++j)
    for (const auto& [key, c] : pattern.terms())
      out.add(translate_key(key, j, n_sites), c);
  return out;
}

ConvergenceProbeReport convergence_probe(const PauliPolynomial& pattern,
                                         double epsilon,
                                         const std::vector<int>& sizes,
                                         double B,
                                         const IntegratorConfig& cfg,
                                         int window) {
  if (sizes.empty())
    throw std::invalid_argument("convergence_probe: no sizes");
  if (!(B >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("convergence_probe: bad epsilon or B");
  if (window < 1)
    throw std::invalid_argument("convergence_probe: window must be >= 1");

  ConvergenceProbeReport rep;
  rep.sizes = sizes;
  rep.window = window;
  for (const int n : sizes) {
    if (n < window || n < pattern.n_sites() || n > kMaxDenseSites)
      throw std::invalid_argument(
          "convergence_probe: size outside [window, dense cap]");
    const PauliPolynomial v = z_sum(n);
    const PauliPolynomial h0 =
        v + std::complex<double>(epsilon) * tile_pattern(pattern, n);
    std::vector<double> grid{0.0};
    if (B > 0.0) grid.push_back(B);
    const SpinTrajectory traj = dense_flow(h0, v, grid, cfg);
    const PauliPolynomial& endpoint = traj.snapshots.back();

    const int start = n / 2 - window / 2;
    std::map<std::string, std::complex<double>> central;
    std::vector<double> weight(static_cast<std::size_t>(n) + 1, 0.0);
    for (const auto& [key, c] : endpoint.terms()) {
      weight[static_cast<std::size_t>(ring_diameter(key, n))] += std::norm(c);
      bool inside = true;
      for (const int site : support_of_key(key, n))
        inside = inside && site >= start && site < start + window;
      if (inside)
        central.emplace(string_from_key(key, n).substr(
                            static_cast<std::size_t>(start),
                            static_cast<std::size_t>(window)),
                        c);
    }
    rep.central.push_back(std::move(central));
    rep.diameter_weight.push_back(std::move(weight));
  }

  for (std::size_t i = 0; i + 1 < rep.central.size(); ++i) {
    std::map<std::string, double> diff;
    const auto& lo = rep.central[i];
    const auto& hi = rep.central[i + 1];
    for (const auto& [label, c] : lo)
      diff[label] = std::abs(
          c - (hi.count(label) ? hi.at(label) : std::complex<double>(0.0)));
    for (const auto& [label, c] : hi)
      if (!lo.count(label)) diff[label] = std::abs(c);
    rep.differences.push_back(std::move(diff));
  }
  return rep;
}

std::string central_csv(const ConvergenceProbeReport& rep) {
  std::string out = "size,string,coefficient_re,coefficient_im\n";
  for (std::size_t i = 0; i < rep.sizes.size(); ++i)
    for (const auto& [label, c] : rep.central[i])
      out += std::to_string(rep.sizes[i]) + "," + label + "," +
             format_g17(c.real()) + "," + format_g17(c.imag()) + "\n";
  return out;
}

std::string weight_csv(const ConvergenceProbeReport& rep) {
  std::string out = "size,diameter,weight\n";
  for (std::size_t i = 0; i < rep.sizes.size(); ++i)
    for (std::size_t d = 0; d < rep.diameter_weight[i].size(); ++d)
      out += std::to_string(rep.sizes[i]) + "," + std::to_string(d) + "," +
             format_g17(rep.diameter_weight[i][d]) + "\n";
  return out;
}

}  // namespace bracketflow
