#pragma once

#include "bileg/quaternion.hpp"

namespace bileg::detail {

inline Quat commutator(const Quat& a, const Quat& b) { return (a * b - b * a).imag(); }

/// One fourth-order Munthe-Kaas step for γ̇ = γ·u(t, γ) (left) or γ̇ = u(t, γ)·γ (right).
/// The result is renormalized onto S³.
template <class Gen>
Quat rkmk4_step(const Quat& g, bool left, double t, double h, const Gen& gen) {
  const double sgn = left ? 1.0 : -1.0;
  auto dexpinv = [&](const Quat& omega, const Quat& u) {
    const Quat c1 = commutator(omega, u);
    return u + c1 * (0.5 * sgn) + commutator(omega, c1) * (1.0 / 12.0);
  };
  auto advance = [&](const Quat& omega) { return left ? (g * qexp(omega)).normalized() : (qexp(omega) * g).normalized(); };
  const Quat k1 = gen(t, g);
  const Quat o2 = k1 * (0.5 * h);
  const Quat k2 = dexpinv(o2, gen(t + 0.5 * h, advance(o2)));
  const Quat o3 = k2 * (0.5 * h);
  const Quat k3 = dexpinv(o3, gen(t + 0.5 * h, advance(o3)));
  const Quat o4 = k3 * h;
  const Quat k4 = dexpinv(o4, gen(t + h, advance(o4)));
  return advance((k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0));
}

}  // namespace bileg::detail
