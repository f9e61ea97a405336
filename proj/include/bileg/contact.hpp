#pragma once

#include <array>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "bileg/clifford.hpp"

namespace bileg {

using Vec4 = Eigen::Vector4d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Diagonal form b on R⁴ together with the sign η of the structure.
struct AmbientForm4 {
  Vec4 sigma = Vec4::Ones();
  int eta = 1;

  static AmbientForm4 make(const Vec4& sigma, int eta);
  static AmbientForm4 euclidean(int eta) { return make(Vec4::Ones(), eta); }
  static AmbientForm4 lorentzian(int eta) { return make(Vec4(1, 1, 1, -1), eta); }

  double b(const Vec4& u, const Vec4& v) const { return u.dot(sigma.cwiseProduct(v)); }
  Eigen::Matrix4d matrix() const { return sigma.asDiagonal(); }
};

/// (x, y) ∈ M: b(x,x) ≠ 0, b(y,y) ≠ 0, b(x,y) = 0.
struct BasePoint {
  Vec4 x, y;
  static BasePoint make(const AmbientForm4& form, const Vec4& x, const Vec4& y);
};

/// Residual of M membership, relative to |x||y|.
double base_point_residual(const AmbientForm4& form, const Vec4& x, const Vec4& y);

struct ContactVector {
  Vec4 xi = Vec4::Zero(), mu = Vec4::Zero();
  Vec8 stacked() const;
  static ContactVector from_stacked(const Vec8& v);
};

/// Projection of an ambient vector onto W_p along N_p.
ContactVector w_project(const AmbientForm4& form, const BasePoint& p, const Vec8& v);

/// Largest of the four orthogonality residuals defining W_p.
double w_residual(const AmbientForm4& form, const BasePoint& p, const Vec8& v);

struct StructureFrame {
  AmbientForm4 form;
  BasePoint p;
  int eps = 1;                 ///< sign of b on ⟨x,y⟩^⊥
  Eigen::Matrix4d A;           ///< rotation on ⟨x,y⟩^⊥, zero on ⟨x,y⟩
  Eigen::Matrix<double, 4, 2> contact_basis;  ///< basis of ⟨x,y⟩^⊥
  Mat8 I, J, K, alpha;
  Mat8 G;                      ///< Gram matrix of g^η on R⁸

  double g(const Vec8& s, const Vec8& t) const { return s.dot(G * t); }
  double ghat(const Vec8& s, const Vec8& t) const { return g(s, alpha * t); }
  double omega_i(const Vec8& s, const Vec8& t) const { return g(s, I * t); }
  double omega_k(const Vec8& s, const Vec8& t) const { return g(s, K * t); }
  /// Vol(ξ, ζ) = Vol(x̂, ξ, ζ, ŷ) on the contact plane.
  double vol(const Vec4& a, const Vec4& b) const;
  /// Basis of W_p: (q1,0), (q2,0), (0,q1), (0,q2).
  Eigen::Matrix<double, 8, 4> w_basis() const;
};

StructureFrame frame_at(const AmbientForm4& form, const BasePoint& p);

struct RelationResiduals {
  static constexpr std::array<const char*, 9> names = {"IJ=K", "JK=eta*eps*I", "KI=eta*J", "I^2=-eta", "J^2=-eta*eps",
                                                       "K^2=-eps", "{I,J}=0", "{I,K}=0", "{J,K}=0"};
  std::array<double, 9> values{};
  double max() const;
};

/// The nine Clifford relations of the frame, evaluated on a basis of W_p.
RelationResiduals frame_relations(const StructureFrame& f);

enum class BundleTensor { OmegaI, G, GHat, OmegaK, I, J, K, Alpha };
const char* to_string(BundleTensor t);

using PathInM = std::function<std::pair<Vec4, Vec4>(double)>;
using AmbientSection = std::function<Vec8(double)>;

struct ConstancyResult {
  double residual = 0;
  bool velocity_in_w = true;
  double velocity_residual = 0;
};

/// Richardson-extrapolated covariant derivative of a bundle tensor along a path at parameter t.
/// Sections are projected into W before use; for endomorphisms tau is ignored.
ConstancyResult covariant_constancy_residual(const AmbientForm4& form, const PathInM& path, const AmbientSection& sigma,
                                             const AmbientSection& tau, BundleTensor tensor, double t, double h);

struct CurvaturePairing {
  double lhs = 0, rhs = 0;
};

/// g(R_{X,JX} X, K X) from the second fundamental form of W, against its closed form.
CurvaturePairing curvature_pairing(const AmbientForm4& form, const BasePoint& p, const ContactVector& X);

/// True iff M44 = diag(N, N) with N ∈ O(b2).
bool stabilizer_membership(const Eigen::Matrix4d& M44, const Eigen::Matrix2d& b2, double tol = 1e-10);

struct CliffordIsomorphism {
  Signature2 sig;        ///< signature of Cl(η b2) in the adapted basis
  Eigen::Matrix4d phi;   ///< (ξ, μ) ∈ R²×R² to coefficients (1, i, j, k)
  CliffordElement apply(const Vec4& xi_mu) const { return CliffordElement::from_vector(phi * xi_mu, sig); }
};

/// φ(ξ,μ) = φ₀(ξ) + i⁻¹·φ₀(μ), with i the image of the positive direction v.
CliffordIsomorphism clifford_isomorphism(const Eigen::Matrix2d& b2, const Eigen::Vector2d& v, int eta);

}  // namespace bileg
