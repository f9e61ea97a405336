#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bileg/quaternion.hpp"

namespace bileg {

enum class Side { Left, Right };
const char* to_string(Side s);

/// A·z = y·x̄·z on ⟨x,y⟩^⊥, the quarter turn about the axis determined by (x, y).
Quat rotate_A(const Quat& x, const Quat& y, const Quat& z);

/// Left: g·ξ·g⁻¹; right: g⁻¹·ξ·g.
Quat hopf(const Quat& xi, Side side, const Quat& g);

/// A unit quaternion over c0: hopf(ξ, side, g) = c0, via the minimal rotation taking ξ to c0.
Quat hopf_section(const Quat& xi, Side side, const Quat& c0);

/// α_ξ(v) at g: b(v, g·ξ) for the left fibration, b(v, ξ·g) for the right one.
double contact_form(const Quat& xi, Side side, const Quat& g, const Quat& v);

/// Smooth curve on S² (unit imaginary quaternions) over a parameter interval, with its derivative.
class SphereCurve {
 public:
  struct Eval {
    Eigen::Vector3d c;
    Eigen::Vector3d dc;
  };
  using Fn = std::function<Eval(double)>;

  SphereCurve(Fn fn, double t0, double t1, bool closed, bool arc_length = false, int nsamples = 1024);

  /// Boundary of the cap of the given colatitude around `axis`, traversed positively (see signed_area).
  static SphereCurve latitude(const Eigen::Vector3d& axis, double colatitude, const Eigen::Vector3d* start_dir = nullptr);
  static SphereCurve great_circle(const Eigen::Vector3d& axis, const Eigen::Vector3d* start_dir = nullptr);
  /// Normalized trigonometric polynomial a0 + Σ aₙ cos(nt) + bₙ sin(nt), t ∈ [0, 2π].
  static SphereCurve fourier(const std::vector<Eigen::Vector3d>& cos_coeffs, const std::vector<Eigen::Vector3d>& sin_coeffs);
  /// Cubic spline through points on S² (periodic when closed), projected back to the sphere.
  static SphereCurve from_points(std::vector<Eigen::Vector3d> points, bool closed);

  Eval eval(double t) const;
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double period() const { return t1_ - t0_; }
  bool closed() const { return closed_; }
  /// True when parametrized by (b/4)-arc-length, i.e. b-speed 2.
  bool arc_length() const { return arc_length_; }
  const std::vector<double>& param() const { return param_; }
  const std::vector<Quat>& samples() const { return samples_; }
  /// The closed curve traversed k times.
  SphereCurve repeated(int k) const;

 private:
  Fn fn_;
  double t0_, t1_;
  bool closed_, arc_length_;
  std::vector<double> param_;
  std::vector<Quat> samples_;
};

/// Reparametrize by (b/4)-arc-length on [0, L]; L is the new period().
SphereCurve reparametrize(const SphereCurve& curve);

struct HorizontalCurve {
  Side side = Side::Left;
  Quat axis;
  double step = 0;
  double t0 = 0;
  std::vector<Quat> q;
  std::vector<Quat> dq;

  double t_end() const { return t0 + step * static_cast<double>(q.size() - 1); }
  double param(std::size_t n) const { return t0 + step * static_cast<double>(n); }
  /// Cubic Hermite interpolation between nodes, renormalized.
  Quat at(double t) const;
  Quat derivative_at(double t) const;
  /// max |b(γ̇, γ·ξ)| (left) or |b(γ̇, ξ·γ)| (right) over the nodes.
  double horizontality_residual() const;
  /// max |‖γ̇‖ − 1| over the nodes.
  double speed_residual() const;
};

/// Lie-algebra velocity of the horizontal lift of `curve` at parameter s through g:
/// γ⁻¹γ̇ for the left fibration, γ̇γ⁻¹ for the right one.
Quat horizontal_generator(const SphereCurve& curve, const Quat& xi, Side side, double s, const Quat& g);

/// Horizontal lift by a fourth-order Munthe-Kaas Runge-Kutta scheme with renormalization.
/// The step is shrunk so an integer number of steps covers `length` (default: one period).
HorizontalCurve horizontal_lift(const SphereCurve& curve, const Quat& xi, Side side, const Quat& g0, double h = 1e-3,
                                double length = std::numeric_limits<double>::quiet_NaN());

/// Signed area of a closed spherical polygon by a triangle fan from the first vertex, in (-2π, 2π].
/// S² is oriented by dArea = −det(c, ·, ·), the orientation in which the contact form of the Hopf
/// fibration satisfies dα_ξ = ½·π_ξ*dArea; a horizontal lift is then (−area/4π)-quasiperiodic.
double signed_area_polygon(const std::vector<Eigen::Vector3d>& vertices);

/// Signed area of a closed curve, polygonal estimates at n and 2n vertices Richardson-combined.
double signed_area(const SphereCurve& curve, int n = 4096);

struct Holonomy {
  double q = 0;        ///< in [0, 1): element = exp(2πqξ) (left) or exp(-2πqξ) (right)
  Quat element;
  double period = 0;
  double off_circle = 0;         ///< distance of the element from span{1, ξ}
  double quasiperiod_residual = 0;  ///< max over interior nodes of the quasiperiodicity defect
};

Holonomy holonomy(const HorizontalCurve& lift, double p);

struct HolonomyAreaCheck {
  double area = 0;
  double q_holonomy = 0;
  double q_area = 0;
  double discrepancy = 0;
  bool agree = false;
};

HolonomyAreaCheck holonomy_area_check(const SphereCurve& curve, const Quat& xi, Side side, double h = 1e-3,
                                      double tol = 1e-6);

struct GaussBonnet {
  double area = 0;
  double total_geodesic_curvature = 0;
  double residual = 0;  ///< (area + ∮κ_g − 2π) reduced to (-2π, 2π]
};

GaussBonnet gauss_bonnet_check(const SphereCurve& curve, int n = 4096);

}  // namespace bileg
