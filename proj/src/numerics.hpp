#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

namespace bileg::detail {

template <class T, class F>
T central_derivative(const F& f, double t, double h) {
  return (f(t + h) - f(t - h)) * (0.5 / h);
}

/// Centered difference at h and h/2 combined to cancel the h² term.
template <class T, class F>
T richardson_derivative(const F& f, double t, double h) {
  const T coarse = central_derivative<T>(f, t, h);
  const T fine = central_derivative<T>(f, t, h / 2);
  return (fine * 4.0 - coarse) * (1.0 / 3.0);
}

/// Fourth-order first derivative of uniformly spaced samples get(0..n-1) at index i.
/// Falls back to one-sided stencils within two nodes of either end; needs n >= 5.
template <class T, class Get>
T stencil_d1(const Get& get, int n, int i, double h) {
  const double s = 1.0 / (12.0 * h);
  if (i >= 2 && i <= n - 3) return (get(i - 2) - get(i - 1) * 8.0 + get(i + 1) * 8.0 - get(i + 2)) * s;
  if (i == 0) return (get(0) * -25.0 + get(1) * 48.0 - get(2) * 36.0 + get(3) * 16.0 - get(4) * 3.0) * s;
  if (i == 1) return (get(0) * -3.0 - get(1) * 10.0 + get(2) * 18.0 - get(3) * 6.0 + get(4)) * s;
  if (i == n - 1)
    return (get(n - 1) * 25.0 - get(n - 2) * 48.0 + get(n - 3) * 36.0 - get(n - 4) * 16.0 + get(n - 5) * 3.0) * s;
  return (get(n - 1) * 3.0 + get(n - 2) * 10.0 - get(n - 3) * 18.0 + get(n - 4) * 6.0 - get(n - 5)) * s;
}

/// Fourth-order second derivative; one-sided near the ends, needs n >= 6.
template <class T, class Get>
T stencil_d2(const Get& get, int n, int i, double h) {
  const double s = 1.0 / (12.0 * h * h);
  if (i >= 2 && i <= n - 3) return (get(i - 1) * 16.0 - get(i - 2) - get(i) * 30.0 + get(i + 1) * 16.0 - get(i + 2)) * s;
  auto one_sided = [&](auto at) -> T {
    return (at(0) * 45.0 - at(1) * 154.0 + at(2) * 214.0 - at(3) * 156.0 + at(4) * 61.0 - at(5) * 10.0) * s;
  };
  auto near_end = [&](auto at) -> T {
    return (at(0) * 10.0 - at(1) * 15.0 - at(2) * 4.0 + at(3) * 14.0 - at(4) * 6.0 + at(5)) * s;
  };
  if (i == 0) return one_sided([&](int k) { return get(k); });
  if (i == 1) return near_end([&](int k) { return get(k); });
  if (i == n - 1) return one_sided([&](int k) { return get(n - 1 - k); });
  return near_end([&](int k) { return get(n - 1 - k); });
}

/// Reduce an angle to (-2π, 2π].
inline double wrap_4pi(double a) {
  const double period = 4.0 * M_PI;
  double r = std::fmod(a, period);
  if (r <= -2.0 * M_PI) r += period;
  if (r > 2.0 * M_PI) r -= period;
  return r;
}

/// Reduce to [0, 1).
inline double wrap_unit(double q) {
  double r = q - std::floor(q);
  if (r >= 1.0) r -= 1.0;
  return r;
}

/// Distance from q to the nearest integer.
inline double dist_to_int(double q) { return std::abs(q - std::round(q)); }

/// Best continued-fraction convergent with denominator <= max_den, if within tol.
inline std::optional<std::pair<long, long>> snap_rational(double x, long max_den, double tol) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    if (std::abs(x - static_cast<double>(p2) / static_cast<double>(q2)) < tol) return std::pair<long, long>{p2, q2};
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace bileg::detail
