#include "bileg/quaternion.hpp"

#include <cmath>

#include "bileg/error.hpp"

namespace bileg {

Quat Quat::from_clifford(const CliffordElement& e) {
  if (!(e.sig == Signature2{1, 1})) fail_input("signature_mismatch", "quaternions need the (+,+) signature");
  return {e.a, e.b, e.c, e.d};
}

double Quat::norm() const { return std::sqrt(norm2()); }

Quat Quat::normalized() const {
  const double n = norm();
  if (n == 0.0) fail_math("zero_quaternion", "cannot normalize the zero quaternion");
  return *this * (1.0 / n);
}

Quat Quat::inverse() const {
  const double n = norm2();
  if (n == 0.0) fail_math("zero_quaternion", "the zero quaternion is not invertible");
  return conj() * (1.0 / n);
}

Quat qexp(const Quat& v) {
  const double th = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  // sin(θ)/θ by series near zero keeps full precision for tiny steps.
  const double sinc = th < 1e-4 ? 1.0 - th * th / 6.0 + th * th * th * th / 120.0 : std::sin(th) / th;
  const double e = std::exp(v.w);
  return {e * std::cos(th), e * sinc * v.x, e * sinc * v.y, e * sinc * v.z};
}

Quat exp_axis(const Quat& u, double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {c, s * u.x, s * u.y, s * u.z};
}

Quat ad(const Quat& g, const Quat& v) { return g * v * g.inverse(); }

}  // namespace bileg
