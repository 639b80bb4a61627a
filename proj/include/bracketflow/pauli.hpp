#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bracketflow {

// Per-site symbols of the charge-graded operator basis.  In the 2x2 site
// space with Z = diag(1, -1), Lower is the unit |0><1| (written 'a') and
// Raise its adjoint |1><0| (written 'A'), so conjugation swaps the two and
// a string's charge counts (#a) - (#A).  The basis is closed under products
// up to the single split a*A = (I + Z)/2, A*a = (I - Z)/2.
enum class SiteOp : std::uint8_t { I = 0, Z = 1, Lower = 2, Raise = 3 };

inline constexpr int kMaxStringSites = 32;  // 2 bits per site in a 64-bit key
inline constexpr int kMaxDenseSites = 12;   // dense 2^n representation cap

SiteOp site_op_from_char(char c);  // 'I', 'Z', 'a', 'A'
char to_char(SiteOp op);

// Operator on n_sites qubits stored as a complex combination of product
// strings over {I, Z, a, A}.  A key packs site j's symbol into bits
// 2j..2j+1; site 0 is the leftmost character of the text form and the
// outermost factor of the dense Kronecker form.  The term map is ordered,
// so iteration and serialization are deterministic.  Zero coefficients are
// never stored: mutations erase any term whose coefficient lands exactly on
// zero, which keeps term counts and equality comparisons meaningful
// (canonical form).
class PauliPolynomial {
 public:
  using Key = std::uint64_t;
  using TermMap = std::map<Key, std::complex<double>>;

  PauliPolynomial() = default;
  explicit PauliPolynomial(int n_sites);

  int n_sites() const { return n_sites_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  // Adds c times the string to the polynomial, merging with any existing
  // term.  The text form has one character per site, site 0 first.
  void add(const std::string& symbols, std::complex<double> c);
  void add(Key key, std::complex<double> c);

  // Coefficient of a string; exact 0 for absent terms.
  std::complex<double> coefficient(const std::string& symbols) const;
  std::complex<double> coefficient(Key key) const;

  bool operator==(const PauliPolynomial& o) const;

 private:
  int n_sites_ = 0;
  TermMap terms_;
};

PauliPolynomial::Key key_from_string(const std::string& symbols);
std::string string_from_key(PauliPolynomial::Key key, int n_sites);
SiteOp site_op_at(PauliPolynomial::Key key, int site);

// Ring-algebra on polynomials of matching n_sites.  Products expand each
// string pair site by site; only a/A collisions split a term in two, so the
// expansion stays sharp.  All operations return canonical form.
PauliPolynomial operator+(const PauliPolynomial& x, const PauliPolynomial& y);
PauliPolynomial operator-(const PauliPolynomial& x, const PauliPolynomial& y);
PauliPolynomial operator*(std::complex<double> c, const PauliPolynomial& p);
PauliPolynomial operator*(const PauliPolynomial& x, const PauliPolynomial& y);
PauliPolynomial commutator(const PauliPolynomial& x, const PauliPolynomial& y);

// Conjugates every coefficient and swaps a <-> A sitewise.
PauliPolynomial adjoint(const PauliPolynomial& p);

// True when p equals adjoint(p) with every coefficient difference within
// tol; tol = 0 demands bitwise Hermiticity.
bool is_hermitian(const PauliPolynomial& p, double tol = 0.0);

// Charge of a string: (#a) - (#A).
int charge_of_string(const std::string& symbols);
int charge_of_key(PauliPolynomial::Key key, int n_sites);

// Partition of a polynomial by string charge.  Components carry only their
// own charge and sum back to the original exactly (same doubles: splitting
// moves terms, it never rounds).
struct ChargeDecomposition {
  std::map<int, PauliPolynomial> components;
};

ChargeDecomposition charge_decompose(const PauliPolynomial& p);
PauliPolynomial recombine(const ChargeDecomposition& d);

// Checks [[V, O], V] = lambda * O by string algebra and returns lambda.
// V must be exactly sum_j Z_j and O nonzero; a residual beyond 1e-12
// (relative to O's largest coefficient) throws std::runtime_error, so a
// returned value certifies the eigenoperator identity.
double eigenoperator_check(const PauliPolynomial& V, const PauliPolynomial& O);

// Dense 2^n x 2^n matrix with site 0 as the outermost Kronecker factor.
Eigen::MatrixXcd to_dense(const PauliPolynomial& p);

// Inverse of to_dense by recursive block extraction; coefficients with
// |c| <= drop_tol are discarded (0 keeps everything but exact zeros).
// The matrix dimension must be a power of two within the dense cap.
PauliPolynomial from_dense(const Eigen::MatrixXcd& m, double drop_tol = 0.0);

// Basis change to products over {I, X, Y, Z} with X = a + A, Y = i(A - a),
// and back.  Text keys use one of "IXYZ" per site, site 0 first.
std::map<std::string, std::complex<double>> to_xyz(const PauliPolynomial& p);
PauliPolynomial from_xyz(
    int n_sites, const std::map<std::string, std::complex<double>>& terms);

// V = sum_j Z_j and sum_j X_j on n sites.
PauliPolynomial z_sum(int n_sites);
PauliPolynomial x_sum(int n_sites);

// Sites where the string differs from the identity, ascending.
std::vector<int> support_of_key(PauliPolynomial::Key key, int n_sites);

// Minimal number of contiguous ring sites covering the support; 0 for the
// identity string.
int ring_diameter(PauliPolynomial::Key key, int n_sites);

// Cyclic shift of every site index by `shift` on the n-site ring.
PauliPolynomial::Key translate_key(PauliPolynomial::Key key, int shift,
                                   int n_sites);

// JSON schema: {"n_sites": int, "terms": [{"string": "IZaA...",
//               "re": real, "im": real}, ...]}.
std::string to_json(const PauliPolynomial& p);
PauliPolynomial pauli_from_json(const std::string& text);

}  // namespace bracketflow
