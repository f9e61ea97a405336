#include <doctest.h>

#include <array>
#include <cmath>

#include "bileg/clifford.hpp"
#include "bileg/error.hpp"
#include "generators.hpp"

using namespace bileg;

namespace {

const Signature2 kPP = Signature2::make(1, 1);
const Signature2 kPM = Signature2::make(1, -1);

CliffordElement el(double a, double b, double c, double d, Signature2 s = kPP) { return {a, b, c, d, s}; }

void check_close(const CliffordElement& x, const CliffordElement& y, double tol = 1e-12) {
  CHECK((x.vec() - y.vec()).norm() <= tol);
}

// Product of basis blades 1, e1, e2, e1e2 (bitmasks 0..3) straight from the relations
// e1² = -s1, e2² = -s2, e2e1 = -e1e2.
std::pair<int, double> blade_product(int x, int y, const Signature2& s) {
  double sign = 1.0;
  // Moving each e1 of y left past the e2 of x flips the sign.
  if ((x & 2) && (y & 1)) sign = -sign;
  const int common = x & y;
  if (common & 1) sign *= -s.s1;
  if (common & 2) sign *= -s.s2;
  return {x ^ y, sign};
}

CliffordElement oracle_mul(const CliffordElement& x, const CliffordElement& y) {
  const Eigen::Vector4d a = x.vec(), b = y.vec();
  Eigen::Vector4d out = Eigen::Vector4d::Zero();
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      const auto [r, s] = blade_product(p, q, x.sig);
      out[r] += s * a[p] * b[q];
    }
  return CliffordElement::from_vector(out, x.sig);
}

bool planes_equal(const PlaneSpan& P, const CliffordElement& u, const CliffordElement& v) {
  Eigen::Matrix<double, 4, 4> m;
  m << P.u.vec(), P.v.vec(), u.vec(), v.vec();
  return Eigen::FullPivLU<Eigen::Matrix4d>(m).setThreshold(1e-10).rank() == 2;
}

}  // namespace

TEST_CASE("signature squares and sign parity") {
  const auto s = Signature2::make(1, -1);
  CHECK(s.i_sq() == -1);
  CHECK(s.j_sq() == 1);
  CHECK(s.k_sq() == 1);
  CHECK(Signature2::make(1, 1).sign() == 1);
  CHECK(Signature2::make(-1, -1).sign() == 1);
  CHECK(s.sign() == -1);
  CHECK_THROWS_AS(Signature2::make(0, 1), Error);
}

TEST_CASE("orthonormalizing a form keeps only its signs") {
  CHECK(Signature2::from_form(3, 0, 2) == Signature2::make(1, 1));
  CHECK(Signature2::from_form(1, 2, 1) == Signature2::make(1, -1));
  CHECK(Signature2::from_form(-2, 0, -5) == Signature2::make(-1, -1));
}

TEST_CASE("basis products") {
  const auto i = CliffordElement::unit_i(), j = CliffordElement::unit_j(), k = CliffordElement::unit_k();
  check_close(i * j, k);
  check_close(j * i, -k);
  check_close(i * j * k, CliffordElement::scalar(-1));
  const auto x = el(0.3, -1.2, 4.0, 0.5);
  check_close(CliffordElement::scalar(1) * x, x);
  check_close(el(1, 1, 0, 0) * el(1, 0, 1, 0), el(1, 1, 1, 1));
}

TEST_CASE("product agrees with the blade oracle in every signature") {
  auto r = gen::rng(11);
  for (const auto& sig : gen::signatures())
    for (int n = 0; n < 500; ++n) {
      const auto x = gen::element(r, sig), y = gen::element(r, sig);
      check_close(x * y, oracle_mul(x, y));
    }
}

TEST_CASE("mixed signatures are rejected") {
  CHECK_THROWS_AS(mul(el(1, 0, 0, 0, kPP), el(1, 0, 0, 0, kPM)), Error);
}

TEST_CASE("involutions") {
  const auto x = el(1, 2, 3, 4);
  check_close(apply_involution(x, Involution::Grade), el(1, -2, -3, 4));
  check_close(apply_involution(x, Involution::Reversion), el(1, 2, 3, -4));
  check_close(apply_involution(x, Involution::Conjugation), el(1, -2, -3, -4));
  check_close(conj(x), grade(apply_involution(x, Involution::Reversion)));
}

TEST_CASE("conjugation is an anti-involution and x·x̄ is real") {
  auto r = gen::rng(12);
  for (const auto& sig : gen::signatures())
    for (int n = 0; n < 300; ++n) {
      const auto x = gen::element(r, sig), y = gen::element(r, sig);
      check_close(conj(x * y), conj(y) * conj(x));
      const auto p = x * conj(x);
      CHECK(p.imag().vec().norm() <= 1e-12);
    }
}

TEST_CASE("inner products and symplectic forms") {
  const auto x = el(1, 2, 0, 0);
  CHECK(inner_g(x, x) == doctest::Approx(5).epsilon(1e-15));
  CHECK(inner_ghat(CliffordElement::unit_i(), CliffordElement::unit_i()) == doctest::Approx(-1));
  CHECK(std::abs(omega_axis(CliffordElement::unit_j(), CliffordElement::scalar(1), CliffordElement::unit_i())) < 1e-15);
  CHECK_THROWS_AS(omega_axis(el(0, 2, 0, 0), x, x), Error);
  CHECK_THROWS_AS(omega_axis(el(1, 0, 0, 0), x, x), Error);
}

TEST_CASE("norm formula a² − b²i² − c²j² − d²k²") {
  auto r = gen::rng(13);
  for (const auto& sig : gen::signatures())
    for (int n = 0; n < 200; ++n) {
      const auto x = gen::element(r, sig);
      const double expected = x.a * x.a - x.b * x.b * sig.i_sq() - x.c * x.c * sig.j_sq() - x.d * x.d * sig.k_sq();
      CHECK(norm2(x) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("algebraic identities hold on random elements") {
  auto r = gen::rng(14);
  for (const auto& sig : gen::signatures()) {
    for (int n = 0; n < 1000; ++n) {
      const auto x = gen::integer_element(r, sig), y = gen::integer_element(r, sig), z = gen::integer_element(r, sig);
      CHECK(((x * y) * z).vec() == (x * (y * z)).vec());
      const auto u = gen::element(r, sig), v = gen::element(r, sig), w = gen::element(r, sig);
      check_close((u * v) * w, u * (v * w));
      CHECK(std::abs((u * v).real() - (v * u).real()) <= 1e-12);
    }
    for (int n = 0; n < 300; ++n) {
      const auto x = gen::imaginary(r, sig);
      auto y = gen::imaginary(r, sig);
      const double nx = norm2(x);
      if (std::abs(nx) < 1e-3) continue;
      y = y - x * (inner_g(x, y) / nx);
      check_close(x * y + y * x, CliffordElement::scalar(0, sig));
    }
  }
}

TEST_CASE("m_x is g-antisymmetric, ghat-symmetric and scales both metrics") {
  auto r = gen::rng(15);
  for (const auto& sig : gen::signatures())
    for (int n = 0; n < 300; ++n) {
      const auto x = gen::unit_odd(r, sig);
      const auto y = gen::element(r, sig), z = gen::element(r, sig);
      const double nx = norm2(x);
      CHECK(std::abs(inner_g(x * y, z) + inner_g(y, x * z)) <= 1e-12);
      CHECK(std::abs(inner_ghat(y, x * z) - inner_ghat(x * y, z)) <= 1e-12);
      CHECK(std::abs(inner_g(x * y, x * z) - nx * inner_g(y, z)) <= 1e-12);
      CHECK(std::abs(inner_ghat(x * y, x * z) + nx * inner_ghat(y, z)) <= 1e-12);
      CHECK(std::abs(omega_axis(x, z, z)) <= 1e-12);
    }
}

TEST_CASE("eigenspaces of m_j in signature (+,-)") {
  const auto j = CliffordElement::unit_j(kPM);
  const auto E = eigenspaces_of_mx(j);
  const auto one = CliffordElement::scalar(1, kPM), i = CliffordElement::unit_i(kPM), k = CliffordElement::unit_k(kPM);
  CHECK(planes_equal(E.plus, one + j, i - k));
  check_close(j * (one + j), one + j);
  check_close(j * (i - k), i - k);
  check_close(j * E.minus.u, -E.minus.u);
  check_close(j * E.minus.v, -E.minus.v);
  CHECK_THROWS_AS(eigenspaces_of_mx(CliffordElement::unit_i(kPP)), Error);
}

TEST_CASE("eigenspaces are g-null and ĝ-orthogonal, π₊ doubles ĝ into g") {
  auto r = gen::rng(16);
  for (const auto& sig : gen::signatures()) {
    if (!gen::has_odd_of_sign(sig, -1)) continue;
    for (int n = 0; n < 200; ++n) {
      const auto x = gen::unit_odd(r, sig, -1);
      const auto E = eigenspaces_of_mx(x);
      for (const auto& P : {E.plus, E.minus}) {
        for (const auto& a : {P.u, P.v})
          for (const auto& b : {P.u, P.v}) {
            CHECK(std::abs(inner_g(a, b)) <= 1e-10);
            CHECK(std::abs(2.0 * inner_g(a.even(), b.even()) - inner_ghat(a, b)) <= 1e-10);
          }
      }
      for (const auto& a : {E.plus.u, E.plus.v})
        for (const auto& b : {E.minus.u, E.minus.v}) CHECK(std::abs(inner_ghat(a, b)) <= 1e-10);
    }
  }
}

TEST_CASE("invariant and bilagrangian planes") {
  const auto i = CliffordElement::unit_i(), j = CliffordElement::unit_j(), one = CliffordElement::scalar(1);
  const auto pair = orthonormal_pair_for(i);
  const auto P1 = PlaneSpan::make(one, i);
  CHECK(invariant_plane_test(P1, i));
  CHECK(bilagrangian_test(P1, pair[0], pair[1]));
  const auto P2 = PlaneSpan::make(one, j);
  CHECK_FALSE(invariant_plane_test(P2, i));
  CHECK_FALSE(bilagrangian_test(P2, pair[0], pair[1]));

  const auto jm = CliffordElement::unit_j(kPM);
  const auto E = eigenspaces_of_mx(jm);
  const auto pm = orthonormal_pair_for(jm);
  CHECK_FALSE(invariant_plane_test(E.plus, jm));
  CHECK_FALSE(bilagrangian_test(E.plus, pm[0], pm[1]));
  CHECK_THROWS_AS(PlaneSpan::make(one, one * 2.0), Error);
}

TEST_CASE("invariance and bilagrangian tests agree on random planes") {
  auto r = gen::rng(17);
  for (const auto& sig : gen::signatures()) {
    int disagreements = 0, invariant = 0;
    for (int n = 0; n < 10000; ++n) {
      const auto x = gen::unit_odd(r, sig);
      const auto y = orthonormal_pair_for(x);
      // Half the draws are invariant planes, so both outcomes are exercised.
      const auto P = (n % 2) ? gen::plane(r, sig) : gen::invariant_plane(r, x);
      const bool a = invariant_plane_test(P, x), b = bilagrangian_test(P, y[0], y[1]);
      disagreements += a != b;
      invariant += a;
    }
    CHECK(disagreements == 0);
    CHECK(invariant > 1000);
  }
}

TEST_CASE("plane classification") {
  const auto i = CliffordElement::unit_i(), j = CliffordElement::unit_j(), k = CliffordElement::unit_k();
  const auto one = CliffordElement::scalar(1);
  CHECK(classify_plane(PlaneSpan::make(one - j, k - i), i) == PlaneClass::ExceptionalGraph);
  CHECK(std::abs(ghat_gram_det(PlaneSpan::make(one - j, k - i))) < 1e-12);
  CHECK(classify_plane(PlaneSpan::make(one, i), i) == PlaneClass::Regular);
  CHECK(ghat_gram_det(PlaneSpan::make(one, i)) == doctest::Approx(-1));
  CHECK_THROWS_AS(classify_plane(PlaneSpan::make(one, j), i), Error);
}

TEST_CASE("no null-sum exceptional planes in signature (+,+)") {
  auto r = gen::rng(18);
  for (int n = 0; n < 2000; ++n) {
    const auto x = gen::unit_odd(r, kPP);
    CHECK(classify_plane(gen::invariant_plane(r, x), x) != PlaneClass::ExceptionalNullSum);
  }
}

TEST_CASE("principal vectors of ⟨1, i⟩") {
  const auto i = CliffordElement::unit_i(), one = CliffordElement::scalar(1);
  const auto P = PlaneSpan::make(one, i);
  const auto pv = principal_vectors(P, i);
  REQUIRE(pv.size() == 4);
  const std::array<CliffordElement, 4> expected = {one, -one, i, -i};
  for (const auto& e : expected) {
    bool found = false;
    for (const auto& v : pv) found = found || (v.re.vec() - e.vec()).norm() < 1e-12;
    CHECK(found);
  }
}

TEST_CASE("principal vectors satisfy their defining equations") {
  auto r = gen::rng(19);
  for (const auto& sig : gen::signatures())
    for (int n = 0; n < 300; ++n) {
      const auto x = gen::unit_odd(r, sig);
      const auto P = gen::invariant_plane(r, x);
      if (!invariant_plane_test(P, x) || classify_plane(P, x) != PlaneClass::Regular) continue;
      std::vector<PrincipalVector> pv;
      try {
        pv = principal_vectors(P, x);
      } catch (const Error&) {
        continue;
      }
      for (const auto& v : pv) {
        bool negated = false;
        for (const auto& w : pv) negated = negated || ((w.re + v.re).vec().norm() < 1e-12 && (w.im + v.im).vec().norm() < 1e-12);
        CHECK(negated);
        if (v.complex) continue;
        CHECK(std::abs(inner_g(v.re, x * v.re)) <= 1e-10);
        CHECK(std::abs(std::abs(inner_ghat(v.re, v.re)) - 1.0) <= 1e-10);
        CHECK(std::abs(inner_ghat(v.re, x * v.re)) <= 1e-10);
      }
    }
}

TEST_CASE("principal lines") {
  auto r = gen::rng(20);
  int tested = 0;
  for (const auto& sig : gen::signatures()) {
    if (!gen::has_odd_of_sign(sig, -1)) continue;
    for (int n = 0; n < 300; ++n) {
      const auto x = gen::unit_odd(r, sig, -1);
      const auto P = gen::invariant_plane(r, x);
      if (!invariant_plane_test(P, x) || classify_plane(P, x) != PlaneClass::Regular) continue;
      for (const auto& v : principal_vectors(P, x)) {
        if (v.complex) continue;
        const auto line = principal_line(P, x, v.re);
        CHECK(line.odd().vec().norm() <= 1e-10);
        CHECK(line.vec().norm() > 1e-6);
        CHECK(std::abs(inner_g(v.re.even(), x * v.re.odd())) <= 1e-10);
        ++tested;
      }
    }
  }
  CHECK(tested > 0);
}

TEST_CASE("principal line of an even vector is its own span") {
  // In ⟨1, j⟩ with x = j (signature (+,-)) the principal vectors are ±1 and ±j.
  const auto jm = CliffordElement::unit_j(kPM);
  const auto one = CliffordElement::scalar(1, kPM);
  const auto P = PlaneSpan::make(one, jm);
  REQUIRE(invariant_plane_test(P, jm));
  REQUIRE(classify_plane(P, jm) == PlaneClass::Regular);
  const auto line = principal_line(P, jm, one);
  CHECK(std::abs(line.b) + std::abs(line.c) + std::abs(line.d) < 1e-12);
  CHECK(std::abs(line.a) > 1e-6);
  CHECK_THROWS_AS(principal_line(P, jm, one + jm * 0.5), Error);
  const auto i = CliffordElement::unit_i(kPP);
  CHECK_THROWS_AS(principal_line(PlaneSpan::make(CliffordElement::scalar(1, kPP), i), i, CliffordElement::scalar(1, kPP)),
                  Error);
}

TEST_CASE("pseudo-involution eigen split") {
  const Eigen::Matrix4d D = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  const auto s1 = eigen_split(PseudoInvolutionMatrix::make(D));
  CHECK(s1.plus.cols() == 2);
  CHECK(s1.minus.cols() == 2);
  CHECK(s1.balanced());

  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 1) = -1;
  J(1, 0) = 1;
  J(2, 3) = -1;
  J(3, 2) = 1;
  CHECK(eigen_split(PseudoInvolutionMatrix::make(J)).complex_only);

  auto r = gen::rng(21);
  Eigen::Matrix4d S;
  do
    for (int c = 0; c < 4; ++c) S.col(c) = gen::vec4(r);
  while (std::abs(S.determinant()) < 0.1);
  const Eigen::Matrix4d M = S * Eigen::Vector4d(1, 1, 1, -1).asDiagonal() * S.inverse();
  const auto s3 = eigen_split(PseudoInvolutionMatrix::make(M));
  CHECK(s3.plus.cols() == 3);
  CHECK(s3.minus.cols() == 1);
  CHECK_FALSE(s3.balanced());
  CHECK((M * s3.plus - s3.plus).norm() < 1e-9);
  CHECK((M * s3.minus + s3.minus).norm() < 1e-9);
  CHECK_THROWS_AS(PseudoInvolutionMatrix::make(2.0 * D), Error);
}

TEST_CASE("effective pairs") {
  const auto j = CliffordElement::unit_j(), k = CliffordElement::unit_k();
  const auto e = effective_pair_check(j, k);
  CHECK(std::abs(e.wedge) < 1e-12);
  CHECK(e.effective);
  const auto d = effective_pair_check(j, j);
  CHECK(d.wedge == doctest::Approx(2 * norm2(j)));
  CHECK_FALSE(d.effective);

  auto r = gen::rng(22);
  for (const auto& sig : gen::signatures())
    for (int n = 0; n < 200; ++n) {
      const auto x = gen::imaginary(r, sig), y = gen::imaginary(r, sig);
      const auto p = effective_pair_check(x, y);
      CHECK(std::abs(p.wedge - p.two_g) <= 1e-12);
      CHECK(p.two_g == doctest::Approx(2 * inner_g(x, y)).epsilon(1e-12));
    }
}
