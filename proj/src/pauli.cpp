#include "bracketflow/pauli.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace bracketflow {
namespace {

constexpr int code_of(SiteOp op) { return static_cast<int>(op); }

// Single-site products x*y.  Each entry lists up to two (symbol, weight)
// factors; count 0 marks an annihilated product (a*a = A*A = 0).  The only
// two-term rows are a*A = (I + Z)/2 and A*a = (I - Z)/2.
struct SiteProduct {
  int count;
  struct {
    std::uint8_t op;
    double w;
  } out[2];
};

constexpr std::uint8_t kI = 0, kZ = 1, ka = 2, kA = 3;

constexpr SiteProduct kSiteTable[4][4] = {
    // I * {I, Z, a, A}
    {{1, {{kI, 1.0}}}, {1, {{kZ, 1.0}}}, {1, {{ka, 1.0}}}, {1, {{kA, 1.0}}}},
    // Z * {I, Z, a, A}
    {{1, {{kZ, 1.0}}}, {1, {{kI, 1.0}}}, {1, {{ka, 1.0}}}, {1, {{kA, -1.0}}}},
    // a * {I, Z, a, A}
    {{1, {{ka, 1.0}}},
     {1, {{ka, -1.0}}},
     {0, {}},
     {2, {{kI, 0.5}, {kZ, 0.5}}}},
    // A * {I, Z, a, A}
    {{1, {{kA, 1.0}}},
     {1, {{kA, 1.0}}},
     {2, {{kI, 0.5}, {kZ, -0.5}}},
     {0, {}}},
};

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxStringSites)
    throw std::invalid_argument("PauliPolynomial: n_sites out of [1, 32]");
}

void check_match(const PauliPolynomial& x, const PauliPolynomial& y,
                 const char* who) {
  if (x.n_sites() != y.n_sites() || x.n_sites() == 0)
    throw std::invalid_argument(std::string(who) + ": n_sites mismatch");
}

// Dense 2x2 site factors, indexed by symbol code.  All real, so per-term
// Kronecker products stay in real arithmetic.
Eigen::Matrix2d site_matrix(int code) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  switch (code) {
    case kI: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case kZ: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    case ka: m(0, 1) = 1.0; break;
    default: m(1, 0) = 1.0; break;
  }
  return m;
}

}  // namespace

SiteOp site_op_from_char(char c) {
  switch (c) {
    case 'I': return SiteOp::I;
    case 'Z': return SiteOp::Z;
    case 'a': return SiteOp::Lower;
    case 'A': return SiteOp::Raise;
    default:
      throw std::invalid_argument(std::string("site_op_from_char: '") + c +
                                  "' is not one of I, Z, a, A");
  }
}

char to_char(SiteOp op) {
  constexpr char chars[4] = {'I', 'Z', 'a', 'A'};
  return chars[code_of(op)];
}

PauliPolynomial::PauliPolynomial(int n_sites) : n_sites_(n_sites) {
  check_sites(n_sites);
}

void PauliPolynomial::add(const std::string& symbols, std::complex<double> c) {
  if (static_cast<int>(symbols.size()) != n_sites_)
    throw std::invalid_argument("PauliPolynomial::add: string length != n_sites");
  add(key_from_string(symbols), c);
}

void PauliPolynomial::add(Key key, std::complex<double> c) {
  if (n_sites_ == 0)
    throw std::logic_error("PauliPolynomial::add: default-constructed");
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

std::complex<double> PauliPolynomial::coefficient(
    const std::string& symbols) const {
  if (static_cast<int>(symbols.size()) != n_sites_)
    throw std::invalid_argument(
        "PauliPolynomial::coefficient: string length != n_sites");
  return coefficient(key_from_string(symbols));
}

std::complex<double> PauliPolynomial::coefficient(Key key) const {
  const auto it = terms_.find(key);
  return it == terms_.end() ? std::complex<double>(0.0) : it->second;
}

bool PauliPolynomial::operator==(const PauliPolynomial& o) const {
  return n_sites_ == o.n_sites_ && terms_ == o.terms_;
}

PauliPolynomial::Key key_from_string(const std::string& symbols) {
  if (symbols.empty() || symbols.size() > kMaxStringSites)
    throw std::invalid_argument("key_from_string: length out of [1, 32]");
  PauliPolynomial::Key key = 0;
  for (std::size_t j = 0; j < symbols.size(); ++j)
    key |= static_cast<PauliPolynomial::Key>(code_of(site_op_from_char(symbols[j])))
           << (2 * j);
  return key;
}

std::string string_from_key(PauliPolynomial::Key key, int n_sites) {
  check_sites(n_sites);
  std::string s(static_cast<std::size_t>(n_sites), 'I');
  for (int j = 0; j < n_sites; ++j)
    s[static_cast<std::size_t>(j)] = to_char(site_op_at(key, j));
  return s;
}

SiteOp site_op_at(PauliPolynomial::Key key, int site) {
  return static_cast<SiteOp>((key >> (2 * site)) & 3u);
}

PauliPolynomial operator+(const PauliPolynomial& x, const PauliPolynomial& y) {
  check_match(x, y, "operator+");
  PauliPolynomial out = x;
  for (const auto& [key, c] : y.terms()) out.add(key, c);
  return out;
}

PauliPolynomial operator-(const PauliPolynomial& x, const PauliPolynomial& y) {
  check_match(x, y, "operator-");
  PauliPolynomial out = x;
  for (const auto& [key, c] : y.terms()) out.add(key, -c);
  return out;
}

PauliPolynomial operator*(std::complex<double> c, const PauliPolynomial& p) {
  if (p.n_sites() == 0)
    throw std::invalid_argument("operator*: default-constructed polynomial");
  PauliPolynomial out(p.n_sites());
  if (c == 0.0) return out;
  for (const auto& [key, w] : p.terms()) out.add(key, c * w);
  return out;
}

PauliPolynomial operator*(const PauliPolynomial& x, const PauliPolynomial& y) {
  check_match(x, y, "operator*");
  const int n = x.n_sites();
  PauliPolynomial out(n);
  // Scratch for the sitewise expansion of one string pair; reused across
  // pairs to avoid churn.
  std::vector<std::pair<PauliPolynomial::Key, double>> cur, next;
  for (const auto& [kx, cx] : x.terms()) {
    for (const auto& [ky, cy] : y.terms()) {
      cur.assign(1, {0, 1.0});
      for (int j = 0; j < n && !cur.empty(); ++j) {
        const auto& prod =
            kSiteTable[(kx >> (2 * j)) & 3u][(ky >> (2 * j)) & 3u];
        next.clear();
        for (const auto& [key, w] : cur)
          for (int t = 0; t < prod.count; ++t)
            next.emplace_back(
                key | (static_cast<PauliPolynomial::Key>(prod.out[t].op)
                       << (2 * j)),
                w * prod.out[t].w);
        cur.swap(next);
      }
      const std::complex<double> c = cx * cy;
      for (const auto& [key, w] : cur) out.add(key, c * w);
    }
  }
  return out;
}

PauliPolynomial commutator(const PauliPolynomial& x, const PauliPolynomial& y) {
  return x * y - y * x;
}

PauliPolynomial adjoint(const PauliPolynomial& p) {
  if (p.n_sites() == 0)
    throw std::invalid_argument("adjoint: default-constructed polynomial");
  PauliPolynomial out(p.n_sites());
  for (const auto& [key, c] : p.terms()) {
    PauliPolynomial::Key conj_key = key;
    for (int j = 0; j < p.n_sites(); ++j)
      if (((key >> (2 * j)) & 2u) != 0)  // a <-> A: flip the low bit
        conj_key ^= PauliPolynomial::Key(1) << (2 * j);
    out.add(conj_key, std::conj(c));
  }
  return out;
}

bool is_hermitian(const PauliPolynomial& p, double tol) {
  const PauliPolynomial diff = p - adjoint(p);
  double worst = 0.0;
  for (const auto& [key, c] : diff.terms())
    worst = std::max(worst, std::abs(c));
  return worst <= tol;
}

int charge_of_string(const std::string& symbols) {
  return charge_of_key(key_from_string(symbols),
                       static_cast<int>(symbols.size()));
}

int charge_of_key(PauliPolynomial::Key key, int n_sites) {
  check_sites(n_sites);
  int q = 0;
  for (int j = 0; j < n_sites; ++j) {
    const auto op = site_op_at(key, j);
    if (op == SiteOp::Lower) ++q;
    if (op == SiteOp::Raise) --q;
  }
  return q;
}

ChargeDecomposition charge_decompose(const PauliPolynomial& p) {
  if (p.n_sites() == 0)
    throw std::invalid_argument("charge_decompose: default-constructed");
  ChargeDecomposition d;
  for (const auto& [key, c] : p.terms()) {
    const int q = charge_of_key(key, p.n_sites());
    auto [it, inserted] =
        d.components.try_emplace(q, PauliPolynomial(p.n_sites()));
    it->second.add(key, c);
  }
  return d;
}

PauliPolynomial recombine(const ChargeDecomposition& d) {
  if (d.components.empty())
    throw std::invalid_argument("recombine: empty decomposition");
  PauliPolynomial out(d.components.begin()->second.n_sites());
  for (const auto& [q, comp] : d.components)
    for (const auto& [key, c] : comp.terms()) out.add(key, c);
  return out;
}

double eigenoperator_check(const PauliPolynomial& V, const PauliPolynomial& O) {
  check_match(V, O, "eigenoperator_check");
  if (!(V == z_sum(V.n_sites())))
    throw std::invalid_argument("eigenoperator_check: V must be sum_j Z_j");
  if (O.is_zero())
    throw std::invalid_argument("eigenoperator_check: O must be nonzero");

  double scale = 0.0;
  PauliPolynomial::Key pivot = 0;
  for (const auto& [key, c] : O.terms())
    if (std::abs(c) > scale) {
      scale = std::abs(c);
      pivot = key;
    }

  const PauliPolynomial c2 = commutator(commutator(V, O), V);
  const std::complex<double> ratio = c2.coefficient(pivot) / O.coefficient(pivot);
  const double lambda = ratio.real();

  const PauliPolynomial residual = c2 - lambda * O;
  double worst = std::abs(ratio.imag()) * scale;
  for (const auto& [key, c] : residual.terms())
    worst = std::max(worst, std::abs(c));
  if (worst > 1e-12 * scale)
    throw std::runtime_error(
        "eigenoperator_check: O is not an eigenoperator (residual " +
        std::to_string(worst / scale) + ")");
  return lambda;
}

Eigen::MatrixXcd to_dense(const PauliPolynomial& p) {
  if (p.n_sites() == 0)
    throw std::invalid_argument("to_dense: default-constructed polynomial");
  if (p.n_sites() > kMaxDenseSites)
    throw std::invalid_argument("to_dense: n_sites beyond dense cap");
  const long dim = 1L << p.n_sites();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXd cur, grown;
  for (const auto& [key, c] : p.terms()) {
    cur.resize(1, 1);
    cur(0, 0) = 1.0;
    // Site n-1 innermost, site 0 outermost.
    for (int j = p.n_sites() - 1; j >= 0; --j) {
      const Eigen::Matrix2d f = site_matrix((key >> (2 * j)) & 3u);
      const long d = cur.rows();
      grown.setZero(2 * d, 2 * d);
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          if (f(r, s) != 0.0) grown.block(r * d, s * d, d, d) = f(r, s) * cur;
      cur.swap(grown);
    }
    out += c * cur;
  }
  return out;
}

namespace {

// Peels site `site` off the top-left/bottom-right block structure.  Every
// leaf coefficient is an average of entries, so a block whose entries all
// sit within drop_tol cannot produce a survivor and is pruned whole.
void extract_terms(const Eigen::MatrixXcd& m, int site, int n_sites,
                   PauliPolynomial::Key prefix, double drop_tol,
                   PauliPolynomial& out) {
  if (m.cwiseAbs().maxCoeff() <= drop_tol) return;
  if (site == n_sites) {
    out.add(prefix, m(0, 0));
    return;
  }
  const long d = m.rows() / 2;
  const Eigen::MatrixXcd blocks[4] = {
      (m.topLeftCorner(d, d) + m.bottomRightCorner(d, d)) / 2.0,   // I
      (m.topLeftCorner(d, d) - m.bottomRightCorner(d, d)) / 2.0,   // Z
      m.topRightCorner(d, d),                                      // a
      m.bottomLeftCorner(d, d),                                    // A
  };
  for (int code = 0; code < 4; ++code)
    extract_terms(blocks[code], site + 1, n_sites,
                  prefix | (static_cast<PauliPolynomial::Key>(code)
                            << (2 * site)),
                  drop_tol, out);
}

}  // namespace

PauliPolynomial from_dense(const Eigen::MatrixXcd& m, double drop_tol) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw std::invalid_argument("from_dense: need a square matrix, dim >= 2");
  int n_sites = 0;
  long dim = m.rows();
  while (dim > 1 && dim % 2 == 0) {
    dim /= 2;
    ++n_sites;
  }
  if (dim != 1 || n_sites > kMaxDenseSites)
    throw std::invalid_argument("from_dense: dimension not 2^n within cap");
  if (!(drop_tol >= 0.0))
    throw std::invalid_argument("from_dense: drop_tol must be >= 0");
  PauliPolynomial out(n_sites);
  extract_terms(m, 0, n_sites, 0, drop_tol, out);
  return out;
}

std::map<std::string, std::complex<double>> to_xyz(const PauliPolynomial& p) {
  if (p.n_sites() == 0)
    throw std::invalid_argument("to_xyz: default-constructed polynomial");
  const int n = p.n_sites();
  std::map<std::string, std::complex<double>> out;
  const std::complex<double> ih(0.0, 0.5);
  std::vector<std::pair<std::string, std::complex<double>>> cur, next;
  for (const auto& [key, c] : p.terms()) {
    cur.assign(1, {std::string(static_cast<std::size_t>(n), 'I'), c});
    for (int j = 0; j < n; ++j) {
      const auto op = site_op_at(key, j);
      if (op == SiteOp::I) continue;
      next.clear();
      for (const auto& [s, w] : cur) {
        std::string t = s;
        if (op == SiteOp::Z) {
          t[static_cast<std::size_t>(j)] = 'Z';
          next.emplace_back(t, w);
          continue;
        }
        // a = (X + iY)/2, A = (X - iY)/2.
        t[static_cast<std::size_t>(j)] = 'X';
        next.emplace_back(t, 0.5 * w);
        t[static_cast<std::size_t>(j)] = 'Y';
        next.emplace_back(t, (op == SiteOp::Lower ? ih : -ih) * w);
      }
      cur.swap(next);
    }
    for (const auto& [s, w] : cur) {
      auto [it, inserted] = out.try_emplace(s, w);
      if (!inserted) it->second += w;
      if (it->second == 0.0) out.erase(it);
    }
  }
  return out;
}

PauliPolynomial from_xyz(
    int n_sites, const std::map<std::string, std::complex<double>>& terms) {
  PauliPolynomial out(n_sites);
  const std::complex<double> i1(0.0, 1.0);
  std::vector<std::pair<PauliPolynomial::Key, std::complex<double>>> cur, next;
  for (const auto& [s, c] : terms) {
    if (static_cast<int>(s.size()) != n_sites)
      throw std::invalid_argument("from_xyz: string length != n_sites");
    cur.assign(1, {0, c});
    for (int j = 0; j < n_sites; ++j) {
      const char ch = s[static_cast<std::size_t>(j)];
      if (ch == 'I') continue;
      next.clear();
      for (const auto& [key, w] : cur) {
        const auto at = [&](std::uint8_t code) {
          return key | (static_cast<PauliPolynomial::Key>(code) << (2 * j));
        };
        switch (ch) {
          case 'Z':
            next.emplace_back(at(kZ), w);
            break;
          case 'X':  // X = a + A
            next.emplace_back(at(ka), w);
            next.emplace_back(at(kA), w);
            break;
          case 'Y':  // Y = i(A - a)
            next.emplace_back(at(ka), -i1 * w);
            next.emplace_back(at(kA), i1 * w);
            break;
          default:
            throw std::invalid_argument(
                std::string("from_xyz: '") + ch + "' is not one of I, X, Y, Z");
        }
      }
      cur.swap(next);
    }
    for (const auto& [key, w] : cur) out.add(key, w);
  }
  return out;
}

PauliPolynomial z_sum(int n_sites) {
  PauliPolynomial out(n_sites);
  for (int j = 0; j < n_sites; ++j)
    out.add(static_cast<PauliPolynomial::Key>(kZ) << (2 * j), 1.0);
  return out;
}

PauliPolynomial x_sum(int n_sites) {
  PauliPolynomial out(n_sites);
  for (int j = 0; j < n_sites; ++j) {
    out.add(static_cast<PauliPolynomial::Key>(ka) << (2 * j), 1.0);
    out.add(static_cast<PauliPolynomial::Key>(kA) << (2 * j), 1.0);
  }
  return out;
}

std::vector<int> support_of_key(PauliPolynomial::Key key, int n_sites) {
  check_sites(n_sites);
  std::vector<int> sites;
  for (int j = 0; j < n_sites; ++j)
    if (((key >> (2 * j)) & 3u) != 0) sites.push_back(j);
  return sites;
}

int ring_diameter(PauliPolynomial::Key key, int n_sites) {
  const std::vector<int> sites = support_of_key(key, n_sites);
  if (sites.empty()) return 0;
  // Minimal covering arc = ring minus the widest empty gap between
  // consecutive support sites (cyclically), plus the site closing the arc.
  int max_gap = sites.front() + n_sites - sites.back();
  for (std::size_t i = 0; i + 1 < sites.size(); ++i)
    max_gap = std::max(max_gap, sites[i + 1] - sites[i]);
  return n_sites - max_gap + 1;
}

PauliPolynomial::Key translate_key(PauliPolynomial::Key key, int shift,
                                   int n_sites) {
  check_sites(n_sites);
  PauliPolynomial::Key out = 0;
  for (int j = 0; j < n_sites; ++j) {
    const int to = ((j + shift) % n_sites + n_sites) % n_sites;
    out |= ((key >> (2 * j)) & 3u) << (2 * to);
  }
  return out;
}

std::string to_json(const PauliPolynomial& p) {
  nlohmann::json j;
  j["n_sites"] = p.n_sites();
  auto terms = nlohmann::json::array();
  for (const auto& [key, c] : p.terms())
    terms.push_back({{"string", string_from_key(key, p.n_sites())},
                     {"re", c.real()},
                     {"im", c.imag()}});
  j["terms"] = std::move(terms);
  return j.dump();
}

PauliPolynomial pauli_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PauliPolynomial out(j.at("n_sites").get<int>());
  for (const auto& term : j.at("terms"))
    out.add(term.at("string").get<std::string>(),
            {term.at("re").get<double>(), term.at("im").get<double>()});
  return out;
}

}  // namespace bracketflow
