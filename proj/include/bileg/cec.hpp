#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bileg {

/// Surfaces in R³ (stored with a zero fourth coordinate) or in the upper hyperboloid of R^{3,1}.
enum class Ambient { Euclidean, Hyperbolic };

/// b = diag(1,1,1,0) for R³ and diag(1,1,1,−1) for R^{3,1}.
double ambient_b(Ambient a, const Eigen::Vector4d& u, const Eigen::Vector4d& v);

/// Uniform rectangular parameter grid, inclusive ranges.
struct PatchGrid {
  double u0 = 0, u1 = 1;
  int n1 = 2;
  double v0 = 0, v1 = 1;
  int n2 = 2;

  static PatchGrid make(double u0, double u1, int n1, double v0, double v1, int n2);
  double h1() const { return (u1 - u0) / (n1 - 1); }
  double h2() const { return (v1 - v0) / (n2 - 1); }
  double u(int i) const { return u0 + i * h1(); }
  double v(int j) const { return v0 + j * h2(); }
  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n1 + i; }
};

struct SurfacePatch {
  Ambient ambient = Ambient::Euclidean;
  PatchGrid grid;
  std::vector<Eigen::Vector4d> e, nu;

  double b(const Eigen::Vector4d& x, const Eigen::Vector4d& y) const { return ambient_b(ambient, x, y); }
  /// Samples position and unit normal; checks |ν| = 1, and b(e,e) = −1, b(e,ν) = 0 in the hyperbolic case.
  static SurfacePatch sample(Ambient a, const PatchGrid& g,
                             const std::function<std::pair<Eigen::Vector4d, Eigen::Vector4d>(double, double)>& f);
  /// Largest violation of the pointwise invariants.
  double invariant_residual() const;
};

/// Tractrix of revolution (sech u cos v, sech u sin v, u − tanh u) with u in [u0, u1], v in [0, π]; K = −1.
SurfacePatch pseudosphere_patch(int n, double u0 = 0.5, double u1 = 2.0);
/// Points at distance r from the geodesic (0,0,sinh s,cosh s) in H³; principal curvatures coth r and tanh r.
SurfacePatch hyperbolic_cylinder_patch(double r, int n);
/// Round sphere of radius r in R³ with the outward normal, away from the poles.
SurfacePatch sphere_patch(double r, int n);

struct FundamentalForms {
  std::vector<Eigen::Matrix2d> I, II, III, shape;
  std::vector<double> det_shape;
  double symmetry_residual = 0;     ///< max |II₁₂ − II₂₁| before symmetrizing
  double third_form_residual = 0;   ///< max |III − II·I⁻¹·II|
};

/// I = b(de, de), II = b(dν, de), III = b(dν, dν) by fourth-order differences; shape = I⁻¹·II.
FundamentalForms fundamental_forms(const SurfacePatch& s);

struct GaussLift {
  std::vector<Eigen::Vector4d> x, y;  ///< (e, ν/√k)
  int eta = 1;
  double membership_residual = 0;
  double w_residual = 0;           ///< tangency of the lift to W, relative
  double omega_i_residual = 0;     ///< |ω_i(ê_*∂₁, ê_*∂₂)|, relative
  double omega_k_residual = 0;     ///< |ω_k(ê_*∂₁, ê_*∂₂)|, relative
  double derivative_residual = 0;  ///< |dν − de·A|, relative
};

/// k-Gauss lift. eta = 0 picks +1 in H³ and −1 in R³; the lift is ω_k-lagrangian iff det A = η·k.
GaussLift gauss_lift(const SurfacePatch& s, double k, int eta = 0);

struct FlatMetric {
  std::vector<Eigen::Matrix2d> h;
  std::vector<double> curvature;  ///< Brioschi curvature of h, NaN where masked
  std::vector<bool> umbilic;
  double cec_residual = 0;        ///< max |det A − target|
  double curvature_max = 0;       ///< over unmasked nodes at least `margin` nodes from the edge
  double pullback_residual = 0;   ///< |ê_k*g^{−η} − h| with the lift tangent written as (de, de·A/√k)
};

/// sign = +1: h = I + III/k on a surface with det A = −k. sign = −1: h = I − III/k with det A = k,
/// umbilic nodes masked.
FlatMetric flat_metric(const SurfacePatch& s, double k, int sign, double cec_tol = 1e-4, int margin = 2);

/// Gauss curvature of a possibly indefinite metric (E, F, G) sampled on a grid, by the Brioschi formula.
std::vector<double> brioschi_curvature(const PatchGrid& g, const std::vector<double>& E, const std::vector<double>& F,
                                       const std::vector<double>& G);

/// The three forms of a Chebyshev net written in c = cos θ, s = sin θ and r = √k.
/// Generic in the scalar so the determinant identity can be expanded symbolically.
template <class T>
struct ChebyshevPoint {
  T I[2][2], II[2][2], III[2][2];
};

template <class T>
ChebyshevPoint<T> chebyshev_point(const T& c, const T& s, const T& r) {
  const T zero = c * T(0);
  ChebyshevPoint<T> p{};
  p.I[0][0] = c * c;
  p.I[1][1] = s * s;
  p.II[0][0] = r * s * c;  // (√k/2)·sin 2θ
  p.II[1][1] = zero - r * s * c;
  p.III[0][0] = r * r * s * s;
  p.III[1][1] = r * r * c * c;
  p.I[0][1] = p.I[1][0] = p.II[0][1] = p.II[1][0] = p.III[0][1] = p.III[1][0] = zero;
  return p;
}

struct ThetaGrid {
  PatchGrid grid;
  std::vector<double> theta;
  double k = 1, c = 0;

  static ThetaGrid sample(const PatchGrid& g, const std::function<double(double, double)>& f, double k, double c);
  /// θ(x, y) sampled over [−R, R]² in the null coordinates u = x + y, v = x − y.
  static ThetaGrid sample_null(double R, int n, const std::function<double(double, double)>& theta_xy, double k = 1,
                               double c = 0);
};

/// Forms per node; θ must lie in (0, π/2).
FundamentalForms chebyshev_forms(const ThetaGrid& t);

struct SineGordonResidual {
  std::vector<double> equation;   ///< θ_xx − θ_yy − ((k−c)/2)·sin 2θ
  std::vector<double> area_form;  ///< θ_xx − θ_yy − (k−c)·dArea, dArea from the Chebyshev first form
  double max_equation = 0, max_area_form = 0;
};

SineGordonResidual sine_gordon_residual(const ThetaGrid& t);

struct HazzidakiReport {
  double lhs = 0;          ///< ∬ 2|θ_uv| du dv
  double corner_sum = 0;   ///< 2|θ(R,R) − θ(R,−R) − θ(−R,R) + θ(−R,−R)|
  double rhs = 0;          ///< 4·(max θ − min θ)
  bool sign_constant = false;
  bool holds = false;      ///< lhs <= rhs, asserted only when sign_constant
};

/// The grid axes are the null coordinates (u, v); see ThetaGrid::sample_null.
HazzidakiReport hazzidaki(const ThetaGrid& t);

}  // namespace bileg
