#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketflow/pauli.hpp"
#include "bracketflow/rng.hpp"

using bracketflow::ChargeDecomposition;
using bracketflow::PauliPolynomial;
using bracketflow::Rng;
using bracketflow::SiteOp;
using bracketflow::adjoint;
using bracketflow::charge_decompose;
using bracketflow::charge_of_key;
using bracketflow::charge_of_string;
using bracketflow::commutator;
using bracketflow::eigenoperator_check;
using bracketflow::from_dense;
using bracketflow::from_xyz;
using bracketflow::is_hermitian;
using bracketflow::key_from_string;
using bracketflow::pauli_from_json;
using bracketflow::recombine;
using bracketflow::ring_diameter;
using bracketflow::string_from_key;
using bracketflow::support_of_key;
using bracketflow::to_dense;
using bracketflow::to_json;
using bracketflow::to_xyz;
using bracketflow::translate_key;
using bracketflow::x_sum;
using bracketflow::z_sum;

namespace {

using cd = std::complex<double>;

PauliPolynomial random_poly(Rng& rng, int n, int n_terms) {
  PauliPolynomial p(n);
  const PauliPolynomial::Key mask =
      (n == 32) ? ~PauliPolynomial::Key(0)
                : ((PauliPolynomial::Key(1) << (2 * n)) - 1);
  for (int t = 0; t < n_terms; ++t)
    p.add(rng.next() & mask, cd(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
  return p;
}

double max_abs(const Eigen::MatrixXcd& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_coeff(const PauliPolynomial& p) {
  double worst = 0.0;
  for (const auto& [k, c] : p.terms()) worst = std::max(worst, std::abs(c));
  return worst;
}

}  // namespace

TEST_CASE("keys and strings round trip") {
  const std::string s = "IZaA";
  const auto key = key_from_string(s);
  CHECK(string_from_key(key, 4) == s);
  CHECK(bracketflow::site_op_at(key, 0) == SiteOp::I);
  CHECK(bracketflow::site_op_at(key, 1) == SiteOp::Z);
  CHECK(bracketflow::site_op_at(key, 2) == SiteOp::Lower);
  CHECK(bracketflow::site_op_at(key, 3) == SiteOp::Raise);
  CHECK_THROWS_AS(key_from_string("IZX"), std::invalid_argument);
  CHECK_THROWS_AS(key_from_string(""), std::invalid_argument);
  CHECK_THROWS_AS(PauliPolynomial(0), std::invalid_argument);
  CHECK_THROWS_AS(PauliPolynomial(33), std::invalid_argument);
}

TEST_CASE("canonical form drops exact zeros") {
  PauliPolynomial p(2);
  p.add("Za", 2.0);
  p.add("Za", -2.0);
  CHECK(p.is_zero());
  p.add("aI", 1.0);
  p.add("IA", cd(0.0, 3.0));
  CHECK(p.term_count() == 2);
  CHECK(p.coefficient("aI") == cd(1.0));
  CHECK(p.coefficient("ZZ") == cd(0.0));
}

TEST_CASE("dense factors of the four symbols are the defining matrices") {
  PauliPolynomial p(1);
  p.add("Z", 1.0);
  Eigen::MatrixXcd z = to_dense(p);
  CHECK(z(0, 0) == cd(1.0));
  CHECK(z(1, 1) == cd(-1.0));
  CHECK(z(0, 1) == cd(0.0));

  PauliPolynomial q(1);
  q.add("a", 1.0);
  Eigen::MatrixXcd low = to_dense(q);  // |0><1|, upper triangular
  CHECK(low(0, 1) == cd(1.0));
  CHECK(max_abs(low) == 1.0);
  CHECK(low(1, 0) == cd(0.0));

  // Site 0 outermost: Z on site 0 of two sites has the sign in the lower
  // half of the diagonal.
  PauliPolynomial zi(2);
  zi.add("ZI", 1.0);
  Eigen::MatrixXcd d = to_dense(zi);
  CHECK(d(0, 0) == cd(1.0));
  CHECK(d(1, 1) == cd(1.0));
  CHECK(d(2, 2) == cd(-1.0));
  CHECK(d(3, 3) == cd(-1.0));
}

TEST_CASE("string products match dense arithmetic") {
  // Exhaustive over single-symbol pairs on one site: the whole product
  // table, exactly.
  const char syms[4] = {'I', 'Z', 'a', 'A'};
  for (char x : syms)
    for (char y : syms) {
      PauliPolynomial px(1), py(1);
      px.add(std::string(1, x), 1.0);
      py.add(std::string(1, y), 1.0);
      const Eigen::MatrixXcd lhs = to_dense(px * py);
      const Eigen::MatrixXcd rhs = to_dense(px) * to_dense(py);
      CHECK(max_abs(lhs - rhs) == 0.0);
    }

  // Random polynomials, n = 2..5: products, commutators, and double
  // commutators against the 2^n dense oracle.
  Rng rng(20240817);
  for (int n = 2; n <= 5; ++n) {
    const PauliPolynomial x = random_poly(rng, n, 6);
    const PauliPolynomial y = random_poly(rng, n, 5);
    const PauliPolynomial z = random_poly(rng, n, 4);
    const Eigen::MatrixXcd dx = to_dense(x), dy = to_dense(y), dz = to_dense(z);
    CHECK(max_abs(to_dense(x * y) - dx * dy) <= 1e-12);
    CHECK(max_abs(to_dense(commutator(x, y)) - (dx * dy - dy * dx)) <= 1e-12);
    const Eigen::MatrixXcd dc = dx * dy - dy * dx;
    CHECK(max_abs(to_dense(commutator(commutator(x, y), z)) -
                  (dc * dz - dz * dc)) <= 1e-12);
  }
}

TEST_CASE("charge counts a against A and adds under products") {
  CHECK(charge_of_string("aAZ") == 0);
  CHECK(charge_of_string("aaI") == 2);
  CHECK(charge_of_string("ZZZ") == 0);
  CHECK(charge_of_string("AAA") == -3);

  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 4);
    const PauliPolynomial s1 = random_poly(rng, n, 1);
    const PauliPolynomial s2 = random_poly(rng, n, 1);
    if (s1.is_zero() || s2.is_zero()) continue;
    const int q1 = charge_of_key(s1.terms().begin()->first, n);
    const int q2 = charge_of_key(s2.terms().begin()->first, n);
    const PauliPolynomial prod = s1 * s2;
    for (const auto& [key, c] : prod.terms())
      CHECK(charge_of_key(key, n) == q1 + q2);
  }
}

TEST_CASE("charge decomposition partitions and recombines exactly") {
  PauliPolynomial single(2);
  single.add("aI", cd(0.25, -1.0));
  const ChargeDecomposition d1 = charge_decompose(single);
  CHECK(d1.components.size() == 1);
  CHECK(d1.components.count(1) == 1);

  const ChargeDecomposition dv = charge_decompose(z_sum(6));
  CHECK(dv.components.size() == 1);
  CHECK(dv.components.count(0) == 1);
  CHECK(dv.components.at(0) == z_sum(6));

  Rng rng(99);
  const PauliPolynomial p = random_poly(rng, 3, 12);
  const ChargeDecomposition d = charge_decompose(p);
  for (const auto& [q, comp] : d.components)
    for (const auto& [key, c] : comp.terms())
      CHECK(charge_of_key(key, 3) == q);
  CHECK(recombine(d) == p);  // exact: decomposition only moves terms
}

TEST_CASE("adjoint swaps a and A and conjugates") {
  PauliPolynomial p(2);
  p.add("aZ", cd(1.0, 2.0));
  const PauliPolynomial q = adjoint(p);
  CHECK(q.coefficient("AZ") == std::conj(cd(1.0, 2.0)));
  CHECK(adjoint(q) == p);

  CHECK(is_hermitian(z_sum(4)));
  CHECK(is_hermitian(x_sum(4)));
  CHECK_FALSE(is_hermitian(p));
  PauliPolynomial h(2);
  h.add("aZ", cd(0.5, -0.25));
  h.add("AZ", cd(0.5, 0.25));
  CHECK(is_hermitian(h));

  Rng rng(5);
  const PauliPolynomial r = random_poly(rng, 4, 8);
  const Eigen::MatrixXcd dense = to_dense(r);
  CHECK(max_abs(to_dense(adjoint(r)) - dense.adjoint()) <= 1e-12);
}

TEST_CASE("eigenoperator identity gives -4 q^2") {
  const PauliPolynomial v = z_sum(3);

  PauliPolynomial aa(3);
  aa.add("aaI", 1.0);
  CHECK(eigenoperator_check(v, aa) == doctest::Approx(-16.0).epsilon(1e-14));

  PauliPolynomial zz(3);
  zz.add("ZIZ", 1.0);
  CHECK(eigenoperator_check(v, zz) == doctest::Approx(0.0));

  PauliPolynomial a1(3);
  a1.add("aII", 1.0);
  CHECK(eigenoperator_check(v, a1) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("eigenoperator identity holds for every string up to n = 4") {
  for (int n = 1; n <= 4; ++n) {
    const PauliPolynomial v = z_sum(n);
    const PauliPolynomial::Key count = PauliPolynomial::Key(1) << (2 * n);
    for (PauliPolynomial::Key key = 0; key < count; ++key) {
      PauliPolynomial o(n);
      o.add(key, 1.0);
      const int q = charge_of_key(key, n);
      const double lambda = eigenoperator_check(v, o);
      CHECK(std::abs(lambda - (-4.0 * q * q)) <= 1e-12);
    }
  }
}

TEST_CASE("eigenoperator check rejects bad inputs") {
  PauliPolynomial mixed(2);
  mixed.add("aI", 1.0);
  mixed.add("aa", 1.0);  // charges 1 and 2: not an eigenoperator
  CHECK_THROWS_AS(eigenoperator_check(z_sum(2), mixed), std::runtime_error);

  PauliPolynomial o(2);
  o.add("aI", 1.0);
  CHECK_THROWS_AS(eigenoperator_check(x_sum(2), o), std::invalid_argument);
  CHECK_THROWS_AS(eigenoperator_check(cd(2.0) * z_sum(2), o),
                  std::invalid_argument);
  CHECK_THROWS_AS(eigenoperator_check(z_sum(2), PauliPolynomial(2)),
                  std::invalid_argument);
}

TEST_CASE("dense round trip recovers the polynomial") {
  Rng rng(31);
  const PauliPolynomial p = random_poly(rng, 4, 10);
  const PauliPolynomial back = from_dense(to_dense(p));
  CHECK(back.n_sites() == 4);
  CHECK(max_coeff(back - p) <= 1e-12);

  // drop_tol prunes small coefficients but leaves the rest untouched.
  PauliPolynomial mixed(2);
  mixed.add("Za", 1.0);
  mixed.add("AI", 1e-9);
  const PauliPolynomial pruned = from_dense(to_dense(mixed), 1e-6);
  CHECK(pruned.term_count() == 1);
  CHECK(pruned.coefficient("Za") == cd(1.0));

  CHECK_THROWS_AS(from_dense(Eigen::MatrixXcd::Zero(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(from_dense(Eigen::MatrixXcd::Zero(2, 4)),
                  std::invalid_argument);
}

TEST_CASE("xyz basis change matches the defining matrices and round trips") {
  const PauliPolynomial x = from_xyz(1, {{"X", 1.0}});
  Eigen::MatrixXcd dx = to_dense(x);
  CHECK(dx(0, 1) == cd(1.0));
  CHECK(dx(1, 0) == cd(1.0));
  CHECK(dx(0, 0) == cd(0.0));

  const PauliPolynomial y = from_xyz(1, {{"Y", 1.0}});
  Eigen::MatrixXcd dy = to_dense(y);
  CHECK(dy(0, 1) == cd(0.0, -1.0));
  CHECK(dy(1, 0) == cd(0.0, 1.0));

  // XY = iZ in the string algebra.
  const PauliPolynomial xy = x * y;
  CHECK(xy.term_count() == 1);
  CHECK(std::abs(xy.coefficient("Z") - cd(0.0, 1.0)) <= 1e-15);

  std::map<std::string, cd> terms = {
      {"XIZ", cd(0.5, 0.0)}, {"YYI", cd(0.0, -1.25)}, {"IIX", cd(2.0, 1.0)}};
  const PauliPolynomial p = from_xyz(3, terms);
  const auto round = to_xyz(p);
  CHECK(round.size() == terms.size());
  for (const auto& [s, c] : terms) {
    REQUIRE(round.count(s) == 1);
    CHECK(std::abs(round.at(s) - c) <= 1e-15);
  }
  CHECK_THROWS_AS(from_xyz(2, {{"XQ", 1.0}}), std::invalid_argument);
}

TEST_CASE("support, ring diameter, and translation") {
  const auto key = key_from_string("IZIaII");
  CHECK(support_of_key(key, 6) == std::vector<int>{1, 3});
  CHECK(ring_diameter(key, 6) == 3);
  CHECK(ring_diameter(key_from_string("IIIIII"), 6) == 0);
  CHECK(ring_diameter(key_from_string("aIIIII"), 6) == 1);
  CHECK(ring_diameter(key_from_string("ZIIIIA"), 6) == 2);  // wraps the seam
  CHECK(ring_diameter(key_from_string("ZIIZII"), 6) == 4);
  CHECK(ring_diameter(key_from_string("ZZZZZZ"), 6) == 6);

  CHECK(string_from_key(translate_key(key, 2, 6), 6) == "IIIZIa");
  CHECK(string_from_key(translate_key(key, -4, 6), 6) == "IIIZIa");
  CHECK(translate_key(translate_key(key, 5, 6), 1, 6) == key);
}

TEST_CASE("json serialization round trips") {
  PauliPolynomial p(3);
  p.add("ZaA", cd(0.125, -3.0));
  p.add("IIZ", cd(1.0 / 3.0, 0.0));
  const PauliPolynomial back = pauli_from_json(to_json(p));
  CHECK(back == p);  // exact doubles through the shortest-round-trip dump

  const std::string j = to_json(p);
  CHECK(j.find("\"n_sites\":3") != std::string::npos);
  CHECK(j.find("ZaA") != std::string::npos);
}

TEST_CASE("mismatched operands are rejected") {
  PauliPolynomial p2(2), p3(3);
  p2.add("aI", 1.0);
  p3.add("aII", 1.0);
  CHECK_THROWS_AS(p2 + p3, std::invalid_argument);
  CHECK_THROWS_AS(p2 * p3, std::invalid_argument);
  CHECK_THROWS_AS(p2.add("aaa", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(to_dense(PauliPolynomial()), std::invalid_argument);
}
