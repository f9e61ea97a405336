#include "bileg/clifford.hpp"

#include <cmath>
#include <string>

#include "bileg/error.hpp"
#include "linalg.hpp"

namespace bileg {

Signature2 Signature2::make(int s1, int s2) {
  if ((s1 != 1 && s1 != -1) || (s2 != 1 && s2 != -1))
    fail_input("signature", "signature entries must be +1 or -1");
  return {s1, s2};
}

Signature2 Signature2::from_form(double b11, double b12, double b22) {
  Eigen::Matrix2d B;
  B << b11, b12, b12, b22;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(B);
  // Eigen sorts ascending; the descending order puts the larger eigenvalue first.
  const double l1 = es.eigenvalues()[1];
  const double l2 = es.eigenvalues()[0];
  const double scale = std::max(std::abs(l1), std::abs(l2));
  if (scale == 0.0 || std::abs(l2) <= 1e-14 * scale || std::abs(l1) <= 1e-14 * scale)
    fail_math("degenerate_form", "symmetric form is degenerate");
  return {l1 > 0 ? 1 : -1, l2 > 0 ? 1 : -1};
}

int Signature2::sign() const {
  const int positives = (s1 > 0) + (s2 > 0);
  return positives % 2 == 0 ? 1 : -1;
}

bool CliffordElement::is_imaginary(double tol) const { return std::abs(a) <= tol; }

static void require_same(const Signature2& x, const Signature2& y) {
  if (!(x == y)) fail_input("signature_mismatch", "operands carry different signatures");
}

CliffordElement CliffordElement::operator+(const CliffordElement& o) const {
  require_same(sig, o.sig);
  return {a + o.a, b + o.b, c + o.c, d + o.d, sig};
}

CliffordElement CliffordElement::operator-(const CliffordElement& o) const {
  require_same(sig, o.sig);
  return {a - o.a, b - o.b, c - o.c, d - o.d, sig};
}

CliffordElement mul(const CliffordElement& x, const CliffordElement& y) {
  require_same(x.sig, y.sig);
  const double al = x.sig.i_sq();
  const double be = x.sig.j_sq();
  // ij = k, ik = i²j, jk = -j²i and their reversals.
  return {x.a * y.a + al * x.b * y.b + be * x.c * y.c - al * be * x.d * y.d,
          x.a * y.b + x.b * y.a - be * x.c * y.d + be * x.d * y.c,
          x.a * y.c + x.c * y.a + al * x.b * y.d - al * x.d * y.b,
          x.a * y.d + x.d * y.a + x.b * y.c - x.c * y.b,
          x.sig};
}

CliffordElement apply_involution(const CliffordElement& x, Involution kind) {
  switch (kind) {
    case Involution::Grade: return {x.a, -x.b, -x.c, x.d, x.sig};
    case Involution::Reversion: return {x.a, x.b, x.c, -x.d, x.sig};
    case Involution::Conjugation: return {x.a, -x.b, -x.c, -x.d, x.sig};
  }
  return x;
}

double inner_g(const CliffordElement& x, const CliffordElement& y) {
  require_same(x.sig, y.sig);
  const double s1 = x.sig.s1, s2 = x.sig.s2;
  return x.a * y.a + s1 * x.b * y.b + s2 * x.c * y.c + s1 * s2 * x.d * y.d;
}

double inner_ghat(const CliffordElement& x, const CliffordElement& y) { return inner_g(grade(x), y); }

double norm2(const CliffordElement& x) { return inner_g(x, x); }

static void require_unit_imaginary(const CliffordElement& w, const char* what) {
  if (!w.is_imaginary(1e-12) || std::abs(std::abs(norm2(w)) - 1.0) > 1e-9)
    fail_input("axis", std::string(what) + " must be a unit-length imaginary element");
}

double omega_axis(const CliffordElement& w, const CliffordElement& y, const CliffordElement& z) {
  require_unit_imaginary(w, "omega axis");
  return inner_g(y, w * z);
}

Eigen::Matrix4d left_mult_matrix(const CliffordElement& x) {
  Eigen::Matrix4d m;
  for (int col = 0; col < 4; ++col) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e[col] = 1.0;
    m.col(col) = (x * CliffordElement::from_vector(e, x.sig)).vec();
  }
  return m;
}

Eigen::Matrix4d g_matrix(const Signature2& sig) {
  return Eigen::Vector4d(1.0, sig.s1, sig.s2, sig.s1 * sig.s2).asDiagonal();
}

Eigen::Matrix4d ghat_matrix(const Signature2& sig) {
  return Eigen::Vector4d(1.0, -sig.s1, -sig.s2, sig.s1 * sig.s2).asDiagonal();
}

PlaneSpan PlaneSpan::make(const CliffordElement& u, const CliffordElement& v) {
  require_same(u.sig, v.sig);
  Eigen::Matrix<double, 4, 2> m;
  m.col(0) = u.vec();
  m.col(1) = v.vec();
  if (detail::numerical_rank(m, 1e-10) < 2) fail_input("degenerate_span", "plane spanning vectors are dependent");
  return {u, v};
}

namespace {

Eigen::Matrix<double, 4, 2> orthonormal_basis(const PlaneSpan& P) {
  Eigen::Matrix<double, 4, 2> m;
  m.col(0) = P.u.vec();
  m.col(1) = P.v.vec();
  Eigen::HouseholderQR<Eigen::Matrix<double, 4, 2>> qr(m);
  return qr.householderQ() * Eigen::Matrix<double, 4, 2>::Identity();
}

int sign_of_axis(const CliffordElement& x) {
  require_unit_imaginary(x, "axis");
  return norm2(x) > 0 ? 1 : -1;
}

}  // namespace

std::array<CliffordElement, 2> orthonormal_pair_for(const CliffordElement& x) {
  require_unit_imaginary(x, "axis");
  const double xx = norm2(x);
  for (const auto& e : {CliffordElement::unit_i(x.sig), CliffordElement::unit_j(x.sig), CliffordElement::unit_k(x.sig)}) {
    CliffordElement y = e - x * (inner_g(e, x) / xx);
    const double yy = norm2(y);
    if (std::abs(yy) < 1e-6) continue;
    y = y * (1.0 / std::sqrt(std::abs(yy)));
    return {y, y * x};
  }
  fail_math("no_orthogonal_unit", "no non-null imaginary element orthogonal to the axis");
}

Eigenspaces eigenspaces_of_mx(const CliffordElement& x) {
  if (sign_of_axis(x) > 0) fail_math("positive_axis", "m_x has no real eigenspaces for positive-sign x");
  const CliffordElement one = CliffordElement::scalar(1.0, x.sig);
  const CliffordElement y = orthonormal_pair_for(x)[0];
  const CliffordElement xy = x * y;
  return {PlaneSpan::make(one + x, y + xy), PlaneSpan::make(one - x, y - xy)};
}

bool invariant_plane_test(const PlaneSpan& P, const CliffordElement& x) {
  const int s = sign_of_axis(x);
  const auto Q = orthonormal_basis(P);
  const Eigen::Matrix4d M = left_mult_matrix(x);
  const Eigen::Matrix<double, 4, 2> MQ = M * Q;
  const Eigen::Matrix<double, 4, 2> off = MQ - Q * (Q.transpose() * MQ);
  if (off.norm() > 1e-9) return false;
  if (s > 0) return true;
  const Eigen::Matrix2d R = Q.transpose() * MQ;
  const bool plus = (R - Eigen::Matrix2d::Identity()).norm() < 1e-9;
  const bool minus = (R + Eigen::Matrix2d::Identity()).norm() < 1e-9;
  return !(plus || minus);
}

bool bilagrangian_test(const PlaneSpan& P, const CliffordElement& y1, const CliffordElement& y2) {
  const auto Q = orthonormal_basis(P);
  const Signature2 sig = P.sig();
  const CliffordElement u = CliffordElement::from_vector(Q.col(0), sig);
  const CliffordElement v = CliffordElement::from_vector(Q.col(1), sig);
  return std::abs(omega_axis(y1, u, v)) < 1e-9 && std::abs(omega_axis(y2, u, v)) < 1e-9;
}

const char* to_string(PlaneClass c) {
  switch (c) {
    case PlaneClass::Regular: return "Regular";
    case PlaneClass::ExceptionalNullSum: return "ExceptionalNullSum";
    case PlaneClass::ExceptionalGraph: return "ExceptionalGraph";
    case PlaneClass::ExceptionalNullEigenvector: return "ExceptionalNullEigenvector";
  }
  return "?";
}

double ghat_gram_det(const PlaneSpan& P) {
  const auto Q = orthonormal_basis(P);
  const Eigen::Matrix2d G = Q.transpose() * ghat_matrix(P.sig()) * Q;
  return G.determinant();
}

PlaneClass classify_plane(const PlaneSpan& P, const CliffordElement& x) {
  if (!invariant_plane_test(P, x)) fail_math("not_invariant", "plane is not an invariant non-eigenspace of m_x");
  if (std::abs(ghat_gram_det(P)) > 1e-10) return PlaneClass::Regular;
  if (sign_of_axis(x) < 0) return PlaneClass::ExceptionalNullEigenvector;
  const auto Q = orthonormal_basis(P);
  Eigen::Matrix2d odd;
  odd << Q(1, 0), Q(1, 1), Q(2, 0), Q(2, 1);
  // A nonzero even vector in P forces P = (P ∩ Cl⁺) ⊕ m_x(P ∩ Cl⁺).
  return detail::numerical_rank(odd, 1e-8) < 2 ? PlaneClass::ExceptionalNullSum : PlaneClass::ExceptionalGraph;
}

std::vector<PrincipalVector> principal_vectors(const PlaneSpan& P, const CliffordElement& x) {
  if (classify_plane(P, x) != PlaneClass::Regular) fail_math("exceptional_plane", "principal vectors need a regular plane");
  const Signature2 sig = P.sig();
  const Eigen::Matrix4d M = left_mult_matrix(x);
  const Eigen::Matrix4d Gh = ghat_matrix(sig);
  std::vector<PrincipalVector> out;
  auto elem = [&](const Eigen::Vector4d& v) { return CliffordElement::from_vector(v, sig); };

  if (sign_of_axis(x) > 0) {
    const auto Q = orthonormal_basis(P);
    const Eigen::Matrix2d Hraw = Q.transpose() * Gh * M * Q;
    const Eigen::Matrix2d H = 0.5 * (Hraw + Hraw.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    const double lmin = es.eigenvalues()[0], lmax = es.eigenvalues()[1];
    if (!(lmin < 0 && lmax > 0)) fail_math("no_principal", "ĝ(v, m_x v) has no real null directions on P");
    for (int sgn : {1, -1}) {
      const Eigen::Vector2d c = std::sqrt(lmax) * es.eigenvectors().col(0) + sgn * std::sqrt(-lmin) * es.eigenvectors().col(1);
      Eigen::Vector4d v = Q * c;
      const double n = v.dot(Gh * v);
      v /= std::sqrt(std::abs(n));
      const double s = n > 0 ? 1.0 : -1.0;
      out.push_back({elem(v), elem(Eigen::Vector4d::Zero()), false, s});
      out.push_back({elem(-v), elem(Eigen::Vector4d::Zero()), false, s});
    }
    return out;
  }

  const auto Q = orthonormal_basis(P);
  auto pick = [&](const Eigen::Matrix4d& proj) {
    const Eigen::Matrix<double, 4, 2> c = proj * Q;
    Eigen::Vector4d v = c.col(0).norm() >= c.col(1).norm() ? Eigen::Vector4d(c.col(0)) : Eigen::Vector4d(c.col(1));
    const double n = v.dot(Gh * v);
    return std::pair<Eigen::Vector4d, double>{v / std::sqrt(std::abs(n)), n > 0 ? 1.0 : -1.0};
  };
  const Eigen::Matrix4d I4 = Eigen::Matrix4d::Identity();
  const auto [w, nw] = pick(0.5 * (I4 + M));
  const auto [z, nz] = pick(0.5 * (I4 - M));
  const double r = 1.0 / std::sqrt(2.0);
  if (nz == nw) {
    for (double sz : {1.0, -1.0})
      for (double sw : {1.0, -1.0}) out.push_back({elem(r * (sz * z + sw * w)), elem(Eigen::Vector4d::Zero()), false, nz});
    return out;
  }
  // Mixed norm signs: the principal vectors live in P ⊗ C.
  const Eigen::Vector4d pairs[8][2] = {{z, w}, {z, -w}, {-z, w}, {-z, -w}, {-w, z}, {w, z}, {w, -z}, {-w, -z}};
  for (const auto& p : pairs) {
    const double n = 0.5 * (p[0].dot(Gh * p[0]) - p[1].dot(Gh * p[1]));
    out.push_back({elem(r * p[0]), elem(r * p[1]), true, n});
  }
  return out;
}

CliffordElement principal_line(const PlaneSpan& P, const CliffordElement& x, const CliffordElement& v) {
  if (sign_of_axis(x) > 0) fail_math("positive_axis", "principal lines need a negative-sign axis");
  if (classify_plane(P, x) != PlaneClass::Regular) fail_math("exceptional_plane", "principal lines need a regular plane");
  const CliffordElement mv = x * v;
  if (std::abs(inner_ghat(v, mv)) > 1e-9 || std::abs(inner_g(v, mv)) > 1e-9 ||
      std::abs(std::abs(inner_ghat(v, v)) - 1.0) > 1e-9)
    fail_input("not_principal", "vector is not a principal vector");
  const CliffordElement w = CliffordElement::unit_k(x.sig) * x * v;
  Eigen::Matrix2d odd;
  odd << v.b, w.b, v.c, w.c;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(odd, Eigen::ComputeFullV);
  const Eigen::Vector2d sv = svd.singularValues();
  const double scale = std::max(1.0, sv[0]);
  if (sv[1] > 1e-9 * scale) fail_math("empty_intersection", "E_v meets Cl⁺ only at 0");
  if (sv[0] <= 1e-9 * scale) fail_math("plane_in_even_part", "E_v lies in Cl⁺");
  const Eigen::Vector2d ab = svd.matrixV().col(1);
  CliffordElement line = v * ab[0] + w * ab[1];
  line = line.even();
  return line * (1.0 / line.vec().norm());
}

PseudoInvolutionMatrix PseudoInvolutionMatrix::make(const Eigen::Matrix4d& m, double tol) {
  const Eigen::Matrix4d sq = m * m;
  const double scale = 1.0 + m.squaredNorm();
  if ((sq - Eigen::Matrix4d::Identity()).norm() <= tol * scale) return {m, -1};
  if ((sq + Eigen::Matrix4d::Identity()).norm() <= tol * scale) return {m, 1};
  fail_math("not_pseudo_involution", "matrix square is not ±Id");
}

EigenSplit eigen_split(const PseudoInvolutionMatrix& M) {
  EigenSplit out;
  if (M.eps > 0) {
    out.complex_only = true;
    return out;
  }
  const Eigen::Matrix4d I4 = Eigen::Matrix4d::Identity();
  out.plus = detail::column_space(0.5 * (I4 + M.m), 1e-9);
  out.minus = detail::column_space(0.5 * (I4 - M.m), 1e-9);
  return out;
}

EffectivePair effective_pair_check(const CliffordElement& x, const CliffordElement& xp) {
  if (!x.is_imaginary(1e-12) || !xp.is_imaginary(1e-12)) fail_input("not_imaginary", "effective pairs need imaginary elements");
  const Eigen::Matrix4d G = g_matrix(x.sig);
  const Eigen::Matrix4d O = G * left_mult_matrix(x);
  const Eigen::Matrix4d Op = G * left_mult_matrix(xp);
  const double w = O(0, 1) * Op(2, 3) - O(0, 2) * Op(1, 3) + O(0, 3) * Op(1, 2) + O(2, 3) * Op(0, 1) -
                   O(1, 3) * Op(0, 2) + O(1, 2) * Op(0, 3);
  EffectivePair out;
  out.wedge = x.sig.sign() * w;
  out.two_g = 2.0 * inner_g(x, xp);
  out.effective = std::abs(out.two_g) <= 1e-12 * (1.0 + x.vec().norm() * xp.vec().norm());
  return out;
}

}  // namespace bileg
