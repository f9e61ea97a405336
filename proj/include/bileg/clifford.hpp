#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace bileg {

/// Signs of an orthonormalized 2D form: s1 = b(e1,e1), s2 = b(e2,e2).
struct Signature2 {
  int s1 = 1;
  int s2 = 1;

  /// Validating constructor; both entries must be +1 or -1.
  static Signature2 make(int s1, int s2);
  /// Orthonormalize a symmetric form by eigen-decomposition, eigenvalues in descending order.
  static Signature2 from_form(double b11, double b12, double b22);

  double i_sq() const { return -s1; }
  double j_sq() const { return -s2; }
  double k_sq() const { return -s1 * s2; }
  /// +1 when the number of positive entries is even, -1 otherwise.
  int sign() const;

  friend bool operator==(const Signature2&, const Signature2&) = default;
};

/// a + b i + c j + d k in Cl(b).
struct CliffordElement {
  double a = 0, b = 0, c = 0, d = 0;
  Signature2 sig;

  static CliffordElement scalar(double s, Signature2 sig = {}) { return {s, 0, 0, 0, sig}; }
  static CliffordElement unit_i(Signature2 sig = {}) { return {0, 1, 0, 0, sig}; }
  static CliffordElement unit_j(Signature2 sig = {}) { return {0, 0, 1, 0, sig}; }
  static CliffordElement unit_k(Signature2 sig = {}) { return {0, 0, 0, 1, sig}; }
  static CliffordElement from_vector(const Eigen::Vector4d& v, Signature2 sig) {
    return {v[0], v[1], v[2], v[3], sig};
  }

  Eigen::Vector4d vec() const { return {a, b, c, d}; }
  double real() const { return a; }
  CliffordElement imag() const { return {0, b, c, d, sig}; }
  /// Even part, spanned by 1 and k.
  CliffordElement even() const { return {a, 0, 0, d, sig}; }
  /// Odd part, spanned by i and j.
  CliffordElement odd() const { return {0, b, c, 0, sig}; }
  bool is_imaginary(double tol = 1e-12) const;

  CliffordElement operator+(const CliffordElement& o) const;
  CliffordElement operator-(const CliffordElement& o) const;
  CliffordElement operator-() const { return {-a, -b, -c, -d, sig}; }
  CliffordElement operator*(double s) const { return {a * s, b * s, c * s, d * s, sig}; }
  friend CliffordElement operator*(double s, const CliffordElement& x) { return x * s; }
};

/// Clifford product; throws on signature mismatch.
CliffordElement mul(const CliffordElement& x, const CliffordElement& y);
inline CliffordElement operator*(const CliffordElement& x, const CliffordElement& y) { return mul(x, y); }

enum class Involution { Grade, Reversion, Conjugation };

CliffordElement apply_involution(const CliffordElement& x, Involution kind);
inline CliffordElement conj(const CliffordElement& x) { return apply_involution(x, Involution::Conjugation); }
inline CliffordElement grade(const CliffordElement& x) { return apply_involution(x, Involution::Grade); }

/// g(x,y) = R(x·ȳ).
double inner_g(const CliffordElement& x, const CliffordElement& y);
/// ĝ(x,y) = g(x̂, y).
double inner_ghat(const CliffordElement& x, const CliffordElement& y);
/// ‖x‖² = g(x,x).
double norm2(const CliffordElement& x);
/// ω_w(y,z) = g(y, w·z); w must be a unit imaginary element.
double omega_axis(const CliffordElement& w, const CliffordElement& y, const CliffordElement& z);

/// Matrix of left multiplication by x on coefficient space.
Eigen::Matrix4d left_mult_matrix(const CliffordElement& x);
/// Gram matrix of g on coefficient space: diag(1, s1, s2, s1 s2).
Eigen::Matrix4d g_matrix(const Signature2& sig);
/// Gram matrix of ĝ on coefficient space.
Eigen::Matrix4d ghat_matrix(const Signature2& sig);

struct PlaneSpan {
  CliffordElement u, v;
  /// Throws if u, v are linearly dependent or carry different signatures.
  static PlaneSpan make(const CliffordElement& u, const CliffordElement& v);
  const Signature2& sig() const { return u.sig; }
};

struct Eigenspaces {
  PlaneSpan plus, minus;
};

/// E± of m_x for a unit imaginary x of negative sign.
Eigenspaces eigenspaces_of_mx(const CliffordElement& x);

/// Unit imaginary y1 orthogonal to x (first of i, j, k after Gram-Schmidt) and y2 = y1·x.
std::array<CliffordElement, 2> orthonormal_pair_for(const CliffordElement& x);

bool invariant_plane_test(const PlaneSpan& P, const CliffordElement& x);
bool bilagrangian_test(const PlaneSpan& P, const CliffordElement& y1, const CliffordElement& y2);

enum class PlaneClass { Regular, ExceptionalNullSum, ExceptionalGraph, ExceptionalNullEigenvector };
const char* to_string(PlaneClass c);

/// Normalized Gram determinant of ĝ on P (spans scaled to unit Frobenius size).
double ghat_gram_det(const PlaneSpan& P);
PlaneClass classify_plane(const PlaneSpan& P, const CliffordElement& x);

struct PrincipalVector {
  CliffordElement re;
  CliffordElement im;  ///< zero unless complex
  bool complex = false;
  double ghat_norm = 0;  ///< ĝ(v,v), which is ±1
};

std::vector<PrincipalVector> principal_vectors(const PlaneSpan& P, const CliffordElement& x);

/// Direction of E_v ∩ Cl⁺ with E_v = ⟨v, k·x·v⟩.
CliffordElement principal_line(const PlaneSpan& P, const CliffordElement& x, const CliffordElement& v);

struct PseudoInvolutionMatrix {
  Eigen::Matrix4d m;
  int eps = 1;
  /// Throws unless m² = ±Id within tol.
  static PseudoInvolutionMatrix make(const Eigen::Matrix4d& m, double tol = 1e-9);
};

struct EigenSplit {
  bool complex_only = false;
  Eigen::MatrixXd plus;   ///< columns span E₊
  Eigen::MatrixXd minus;  ///< columns span E₋
  bool balanced() const { return !complex_only && plus.cols() == minus.cols(); }
};

EigenSplit eigen_split(const PseudoInvolutionMatrix& M);

struct EffectivePair {
  double wedge = 0;  ///< ω_x ∧ ω_x' as a multiple of dVol
  double two_g = 0;  ///< 2 g(x, x')
  bool effective = false;
};

/// dVol is oriented as sign(b)·e0∧e1∧e2∧e3 on the basis (1, i, j, k).
EffectivePair effective_pair_check(const CliffordElement& x, const CliffordElement& xp);

}  // namespace bileg
