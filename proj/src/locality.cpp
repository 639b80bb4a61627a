#include "bracketflow/locality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bracketflow {

namespace {

// Smallest integer distance admissible at radius r (distances are integers,
// the constraint is dist > r).
int min_gap(double r) {
  if (r < 0) throw std::invalid_argument("locality radius must be >= 0");
  return static_cast<int>(std::floor(r)) + 1;
}

double block_sigma_max(const Eigen::MatrixXd& m, int r0, int nr, int c0, int nc) {
  if (nr <= 0 || nc <= 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m.block(r0, c0, nr, nc));
  return svd.singularValues()(0);
}

}  // namespace

Eigen::MatrixXd masked_matrix(const Eigen::MatrixXd& m, const Lattice& lat,
                              double r) {
  if (m.rows() != lat.n)
    throw std::invalid_argument("masked_matrix: lattice size mismatch");
  const int g = min_gap(r);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(lat.n, lat.n);
  for (int i = 0; i < lat.n; ++i)
    for (int j = 0; j < lat.n; ++j)
      if (lat.distance(i, j) >= g) out(i, j) = m(i, j);
  return out;
}

double locality_lower(const Eigen::MatrixXd& e, const Lattice& lat, double r) {
  if (e.rows() != lat.n || e.cols() != lat.n)
    throw std::invalid_argument("locality_lower: lattice size mismatch");
  const int n = lat.n;
  const int g = min_gap(r);
  double best = 0.0;

  if (lat.geometry == Geometry::ChainOpen) {
    // Any admissible interval pair is contained in a half-space split
    // A = [0, s], B = [s + g, n); enlarging intervals can only grow the
    // top singular value, so the splits realise the maximum.
    for (int s = 0; s + g < n; ++s) {
      const int nb = n - (s + g);
      best = std::max(best, block_sigma_max(e, 0, s + 1, s + g, nb));
      best = std::max(best, block_sigma_max(e, s + g, nb, 0, s + 1));
    }
  } else {
    // Ring: for an arc A = [start, start+len) the maximal admissible partner
    // keeps each of its endpoints at ring distance exactly g from A, i.e.
    // the complement of A shrunk by g - 1 sites on either side.  Every
    // admissible arc pair embeds in one of these, in either orientation.
    std::vector<int> rows, cols;
    for (int start = 0; start < n; ++start) {
      for (int len = 1; len <= n - 2 * g + 1; ++len) {
        const int blen = n - len - 2 * (g - 1);
        if (blen <= 0) break;
        rows.clear();
        cols.clear();
        for (int i = 0; i < len; ++i) rows.push_back((start + i) % n);
        for (int i = 0; i < blen; ++i)
          cols.push_back((start + len - 1 + g + i) % n);
        Eigen::MatrixXd blk(rows.size(), cols.size());
        for (size_t a = 0; a < rows.size(); ++a)
          for (size_t b = 0; b < cols.size(); ++b)
            blk(a, b) = e(rows[a], cols[b]);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(blk);
        best = std::max(best, svd.singularValues()(0));
      }
    }
  }
  return best;
}

double locality_upper(const Eigen::MatrixXd& e, const Lattice& lat, double r) {
  if (e.rows() != lat.n || e.cols() != lat.n)
    throw std::invalid_argument("locality_upper: lattice size mismatch");
  return operator_norm(masked_matrix(e, lat, r));
}

double locality_lower(const CouplingMatrix& m, const Lattice& lat, double r) {
  return locality_lower(m.entries(), lat, r);
}

double locality_upper(const CouplingMatrix& m, const Lattice& lat, double r) {
  return locality_upper(m.entries(), lat, r);
}

LocalityProfile locality_profile(const CouplingMatrix& m, const Lattice& lat,
                                 std::vector<double> radii, double B) {
  for (size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw std::invalid_argument("locality_profile: radii must ascend");
  LocalityProfile p;
  p.B = B;
  p.radii = std::move(radii);
  p.lower.reserve(p.radii.size());
  p.upper.reserve(p.radii.size());
  // Masking is a Schur multiplier and need not contract the operator norm,
  // so the profile clamps against ‖m‖ (valid: ‖m‖_r ≤ ‖m‖) and against the
  // bound at the previous radius (valid: ‖m‖_r is non-increasing in r).
  const double whole_norm = operator_norm(m);
  for (const double r : p.radii) {
    double lo = locality_lower(m, lat, r);
    double up = locality_upper(m, lat, r);
    up = std::min(up, p.upper.empty() ? whole_norm : p.upper.back());
    if (!p.lower.empty()) lo = std::min(lo, p.lower.back());
    lo = std::min(lo, up);
    p.lower.push_back(lo);
    p.upper.push_back(up);
  }
  return p;
}

}  // namespace bracketflow
