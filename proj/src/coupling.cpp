#include "bracketflow/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace bracketflow {

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd entries, Symmetry symmetry)
    : entries_(std::move(entries)), symmetry_(symmetry) {
  validate();
}

void CouplingMatrix::validate() const {
  if (entries_.rows() != entries_.cols())
    throw std::invalid_argument("CouplingMatrix: entries must be square");
  if (entries_.rows() < 2)
    throw std::invalid_argument("CouplingMatrix: need at least two sites");
  if (!entries_.allFinite())
    throw std::invalid_argument("CouplingMatrix: non-finite entry");
  const double scale = entries_.cwiseAbs().maxCoeff();
  // The class is a structural promise, not an approximate one; the tolerance
  // only absorbs rounding dust from serialisation round trips.
  const double tol = 1e-13 * std::max(scale, 1.0);
  const int n = static_cast<int>(entries_.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double mirrored = symmetry_ == Symmetry::Antisymmetric
                                  ? -entries_(j, i)
                                  : entries_(j, i);
      if (std::abs(entries_(i, j) - mirrored) > tol)
        throw std::invalid_argument("CouplingMatrix: symmetry class violated");
    }
}

int coupling_range(const CouplingMatrix& m, const Lattice& lat) {
  if (m.n() != lat.n)
    throw std::invalid_argument("coupling_range: lattice size mismatch");
  int range = 0;
  for (int i = 0; i < lat.n; ++i)
    for (int j = 0; j < lat.n; ++j)
      if (m.entries()(i, j) != 0.0) range = std::max(range, lat.distance(i, j));
  return range;
}

Eigen::MatrixXd project_to_class(const Eigen::MatrixXd& m, Symmetry sym) {
  if (sym == Symmetry::Antisymmetric) return 0.5 * (m - m.transpose()).eval();
  return 0.5 * (m + m.transpose()).eval();
}

const char* to_string(Symmetry s) {
  return s == Symmetry::Antisymmetric ? "antisymmetric" : "symmetric";
}

Symmetry symmetry_from_string(const std::string& s) {
  if (s == "antisymmetric") return Symmetry::Antisymmetric;
  if (s == "symmetric") return Symmetry::Symmetric;
  throw std::invalid_argument("unknown symmetry class: " + s);
}

std::string to_json(const CouplingMatrix& m) {
  nlohmann::json j;
  j["n"] = m.n();
  j["symmetry"] = to_string(m.symmetry());
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(m.n()) * m.n());
  for (int r = 0; r < m.n(); ++r)
    for (int c = 0; c < m.n(); ++c) flat.push_back(m.entries()(r, c));
  j["entries"] = std::move(flat);
  return j.dump();
}

CouplingMatrix coupling_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const auto sym = symmetry_from_string(j.at("symmetry").get<std::string>());
  const auto& flat = j.at("entries");
  if (static_cast<int>(flat.size()) != n * n)
    throw std::invalid_argument("coupling_from_json: entries length != n*n");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = flat[static_cast<size_t>(r) * n + c].get<double>();
  return CouplingMatrix(std::move(m), sym);
}

}  // namespace bracketflow
