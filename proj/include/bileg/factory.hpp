#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bileg/quaternion.hpp"
#include "bileg/sphere.hpp"

namespace bileg {

/// Rectangular node grid with inclusive ranges; the origin must be a node.
struct GridSpec {
  double x0 = 0, x1 = 1;
  int n1 = 2;
  double y0 = 0, y1 = 1;
  int n2 = 2;

  static GridSpec make(double x0, double x1, int n1, double y0, double y1, int n2);
  double h1() const { return (x1 - x0) / (n1 - 1); }
  double h2() const { return (y1 - y0) / (n2 - 1); }
  double x(int i) const { return x0 + i * h1(); }
  double y(int j) const { return y0 + j * h2(); }
  int origin_i() const;
  int origin_j() const;
  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n1 + i; }
};

/// A curve in S³ sampled on uniform nodes t0 + k·h; dq and ddq are optional exact derivatives.
struct FactorCurve {
  double t0 = 0, h = 1;
  std::vector<Quat> q, dq, ddq;

  double t(std::size_t k) const { return t0 + h * static_cast<double>(k); }
  bool has_derivatives() const { return dq.size() == q.size() && ddq.size() == q.size(); }
  /// First derivatives, exact if attached, else fourth-order stencils.
  std::vector<Quat> first_derivative() const;
  /// Cubic Hermite interpolation on the samples, renormalized.
  Quat at(double t) const;
};

/// φ(x₁,x₂) = (γ₂(x₂)·a·γ₁(x₁), γ₂(x₂)·b·γ₁(x₁)); γ₁ is right (ā·b)-horizontal, γ₂ left (b·ā)-horizontal.
struct Factorization {
  Quat a = Quat::one(), b = Quat::k();
  FactorCurve g1, g2;

  Quat axis1() const { return (a.conj() * b).imag(); }
  Quat axis2() const { return (b * a.conj()).imag(); }
};

/// Factor t ↦ exp(t·u) sampled on n nodes from t0 with spacing h, with exact derivatives.
FactorCurve exp_factor(const Quat& u, double t0, double h, int n);

struct ImmersionGrid {
  GridSpec spec;
  std::vector<Quat> X, Y;  ///< index(i, j): x₁ varies fastest
  std::optional<Factorization> factors;

  const Quat& x_at(int i, int j) const { return X[spec.index(i, j)]; }
  const Quat& y_at(int i, int j) const { return Y[spec.index(i, j)]; }
};

/// Max deviation from |X| = |Y| = 1, b(X,Y) = 0 over the nodes.
double grid_invariant_residual(const ImmersionGrid& g);
/// Throws Input unless the pointwise invariants hold to 1e-9.
void validate_grid(const ImmersionGrid& g);

/// Partial derivatives of X and Y at every node.
struct GridDerivatives {
  std::vector<Quat> X1, X2, Y1, Y2, X11, X12, X22, Y11, Y12, Y22;
  bool analytic = false;
};
GridDerivatives grid_derivatives(const ImmersionGrid& g);

ImmersionGrid construct(const Factorization& f, const GridSpec& spec);

struct NamedResidual {
  std::string name;
  double value = 0;
};

struct ResidualReport {
  std::vector<NamedResidual> entries;
  bool analytic = false;
  double max() const;
  double get(const std::string& name) const;
};

/// Every identity a normalized bilegendrian immersion satisfies, as max-norm residuals over the grid.
ResidualReport residual_suite(const ImmersionGrid& g);

struct LieFactorization {
  FactorCurve A, B;
  Quat C;
  double criterion_left = 0;   ///< max |∂₂(M⁻¹∂₁M)|
  double criterion_right = 0;  ///< max |∂₁(∂₂M·M⁻¹)|
  double reconstruction = 0;   ///< max |B·C·A − M|
};

/// M = B(x₂)·C·A(x₁) with A(0) = B(0) = 1; M is indexed like ImmersionGrid::X.
LieFactorization lie_factorize(const GridSpec& spec, const std::vector<Quat>& M, double criterion_tol = 1e-4);

struct FactorizeResult {
  Factorization factors;
  double reconstruction = 0;
  double horizontality1 = 0;
  double horizontality2 = 0;
};

FactorizeResult factorize(const ImmersionGrid& g, double tol = 1e-6);

struct AngleData {
  double theta0 = 0;  ///< 2·θ(0,0)
  double theta_origin = 0;
  std::vector<double> theta;   ///< on the grid
  std::vector<double> theta1;  ///< along x₁, θ₁(0) = θ(0,0)/2
  std::vector<double> theta2;  ///< along x₂, θ₂(0) = θ(0,0)/2
  std::vector<Quat> e1;
  double wave_residual = 0;      ///< max |∂₁∂₂θ|
  double split_residual = 0;     ///< max |θ − θ₁ − θ₂|
  double frame_residual = 0;     ///< defect of the diagonal-derivative decomposition
  double curvature_residual = 0; ///< max_i |κ_i + 2ε_i ∂_iθ|
  double cubic_residual = 0;     ///< max_i |C(∂_i,∂_i,∂_i) + 4∂_iθ|
};

AngleData angle_function(const ImmersionGrid& g);

struct AsymptoticFrame {
  std::vector<Quat> gamma, T, N, B;
  std::vector<double> kappa, tau;
  double tridiagonal_residual = 0;  ///< max |b(Ṫ, B)|
};

/// Frame along the line x_{3-i} = const through node `line` (i = 1: a row, i = 2: a column).
AsymptoticFrame asymptotic_frame(const ImmersionGrid& g, int i, int line);

/// Immersion with a = 1, b = k, γ̇₁(0) = i, γ̇₂(0) = e^{θ₀k}·i and ∂₁θ = f(x₁), ∂₂θ = g(x₂).
/// f and g are polynomials given by ascending coefficients.
ImmersionGrid from_theta(double theta0, const std::vector<double>& f, const std::vector<double>& g, const GridSpec& spec);

struct ProjectionTest {
  bool immersed = false;
  double margin = 0;
};

/// Distance of the sampled θ values from (π/2)·Z against tol.
ProjectionTest projection_immersion_test(const std::vector<double>& theta, double tol = 1e-9);

struct PeriodLattice {
  double p1 = 0, p2 = 0;
  long q1_num = 1, q1_den = 1, q2_num = 1, q2_den = 1;

  double q1() const { return static_cast<double>(q1_num) / static_cast<double>(q1_den); }
  double q2() const { return static_cast<double>(q2_num) / static_cast<double>(q2_den); }
  /// (m p₁, n p₂) ∈ Λ ⇔ m q₁ − n q₂ ∈ Z.
  bool contains(long m, long n) const;
};

/// Measured quasiperiod data of one factor.
struct Quasiperiod {
  double p = 0;
  double q = 0;  ///< in (0, 1]
  Quat element;
  double residual = 0;
};

/// γ₁(x + p₁) = e^{−2πq₁ξ₁}·γ₁(x) and γ₂(x + p₂) = γ₂(x)·e^{2πq₂ξ₂}, ξ₁ = ā·b, ξ₂ = b·ā.
std::pair<Quasiperiod, Quasiperiod> factor_quasiperiods(const Factorization& f);
PeriodLattice period_lattice(const Factorization& f);
/// Rational snap of q ∈ (0, 1]: denominator <= 64, error < 1e-6.
std::optional<std::pair<long, long>> snap_q(double q);

struct GaussMap {
  Quat m, n;
  std::vector<Eigen::Vector3d> first, second;  ///< π_i(γ₂·m) along x₂ and π_i(γ₁⁻¹·n) along x₁
};

GaussMap gauss_map(const Factorization& f);

struct FlatTorusReport {
  double curvature_integral1 = 0, curvature_integral2 = 0;
  double q1 = 0, q2 = 0;
  bool half_or_whole1 = false, half_or_whole2 = false;
  ProjectionTest projection;
  bool projectable = false;
};

FlatTorusReport flat_torus_criteria(const Factorization& f, const AngleData& angle, const PeriodLattice& lattice);

struct AnsatzResult {
  ImmersionGrid grid;
  HorizontalCurve lift1, lift2;
  Quasiperiod factor1, factor2;
  std::optional<PeriodLattice> lattice;
};

/// Doubly-periodic ansatz: right (ā·b)-lift of c₁ and left (−b·ā)-lift of c₂, both starting at 1.
/// The grid must start at the origin; lifts are integrated over `cover` periods past the grid.
AnsatzResult torus_ansatz(const SphereCurve& c1, const SphereCurve& c2, const Quat& a, const Quat& b,
                          const GridSpec& spec, double h = 1e-3, int cover = 4);

/// ‖φ(x + (m p₁, n p₂)) − φ(x)‖ evaluated on the integrated lifts.
double lattice_displacement(const AnsatzResult& r, int m, int n, double x1, double x2);

}  // namespace bileg
