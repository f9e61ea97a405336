#pragma once

#include <Eigen/Dense>

#include "bileg/clifford.hpp"

namespace bileg {

/// Hamilton quaternion w + x i + y j + z k, i.e. Cl(b) for the signature (+,+).
struct Quat {
  double w = 0, x = 0, y = 0, z = 0;

  static Quat one() { return {1, 0, 0, 0}; }
  static Quat i() { return {0, 1, 0, 0}; }
  static Quat j() { return {0, 0, 1, 0}; }
  static Quat k() { return {0, 0, 0, 1}; }
  static Quat pure(const Eigen::Vector3d& v) { return {0, v[0], v[1], v[2]}; }
  static Quat from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
  static Quat from_clifford(const CliffordElement& e);

  Eigen::Vector4d vec() const { return {w, x, y, z}; }
  Eigen::Vector3d imag_vec() const { return {x, y, z}; }
  Quat imag() const { return {0, x, y, z}; }
  CliffordElement to_clifford() const { return {w, x, y, z, Signature2{1, 1}}; }

  Quat conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const;
  Quat normalized() const;
  Quat inverse() const;

  Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quat operator-() const { return {-w, -x, -y, -z}; }
  Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  friend Quat operator*(double s, const Quat& q) { return q * s; }
  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }
  Quat& operator+=(const Quat& o) { return *this = *this + o; }
};

/// b(p, q) = R(p·q̄), the euclidean inner product on R⁴.
inline double dot(const Quat& p, const Quat& q) { return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z; }
inline double distance(const Quat& p, const Quat& q) { return (p - q).norm(); }

/// exp of an imaginary quaternion v.
Quat qexp(const Quat& v);
/// e^{t·u} for a unit imaginary u.
Quat exp_axis(const Quat& u, double t);
/// ad(g) v = g v g⁻¹.
Quat ad(const Quat& g, const Quat& v);

}  // namespace bileg
