#include <algorithm>
#include <cmath>

#include "bileg/error.hpp"
#include "bileg/factory.hpp"
#include "factory_detail.hpp"
#include "lie.hpp"

namespace bileg {

namespace {

double wrap_pi(double a) { return a - 2.0 * M_PI * std::round(a / (2.0 * M_PI)); }

}  // namespace

AngleData angle_function(const ImmersionGrid& g) {
  validate_grid(g);
  const GridSpec& s = g.spec;
  detail::require_fd_grid(s);
  const GridDerivatives d = grid_derivatives(g);
  const int i0 = s.origin_i(), j0 = s.origin_j();
  const std::size_t N = s.size();

  std::vector<Quat> D(N), E(N);
  AngleData out;
  out.e1.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    D[n] = (d.X1[n] + d.X2[n]) * 0.5;
    E[n] = (d.Y1[n] + d.Y2[n]) * 0.5;
    const Quat& v = D[n].norm() >= E[n].norm() ? D[n] : E[n];
    if (v.norm() < 1e-8) fail_math("non_immersed", "diagonal derivative vanishes at a node");
    out.e1[n] = v * (1.0 / v.norm());
  }

  // e₁ at the origin makes cos θ(0,0) >= 0; elsewhere it continues its neighbour.
  {
    Quat& e = out.e1[s.index(i0, j0)];
    const double c = dot(D[s.index(i0, j0)], e), sn = dot(E[s.index(i0, j0)], e);
    if (c < -1e-12 || (std::abs(c) <= 1e-12 && sn < 0)) e = -e;
  }
  auto align = [&](std::size_t n, std::size_t from) {
    if (dot(out.e1[n], out.e1[from]) < 0) out.e1[n] = -out.e1[n];
  };
  for (int i = i0 + 1; i < s.n1; ++i) align(s.index(i, j0), s.index(i - 1, j0));
  for (int i = i0 - 1; i >= 0; --i) align(s.index(i, j0), s.index(i + 1, j0));
  for (int i = 0; i < s.n1; ++i) {
    for (int j = j0 + 1; j < s.n2; ++j) align(s.index(i, j), s.index(i, j - 1));
    for (int j = j0 - 1; j >= 0; --j) align(s.index(i, j), s.index(i, j + 1));
  }

  std::vector<double> raw(N);
  for (std::size_t n = 0; n < N; ++n) raw[n] = std::atan2(dot(E[n], out.e1[n]), dot(D[n], out.e1[n]));
  std::vector<double>& th = out.theta;
  th.assign(N, 0.0);
  th[s.index(i0, j0)] = raw[s.index(i0, j0)];
  auto unwrap = [&](std::size_t n, std::size_t from) { th[n] = th[from] + wrap_pi(raw[n] - th[from]); };
  for (int i = i0 + 1; i < s.n1; ++i) unwrap(s.index(i, j0), s.index(i - 1, j0));
  for (int i = i0 - 1; i >= 0; --i) unwrap(s.index(i, j0), s.index(i + 1, j0));
  for (int i = 0; i < s.n1; ++i) {
    for (int j = j0 + 1; j < s.n2; ++j) unwrap(s.index(i, j), s.index(i, j - 1));
    for (int j = j0 - 1; j >= 0; --j) unwrap(s.index(i, j), s.index(i, j + 1));
  }

  out.theta_origin = th[s.index(i0, j0)];
  out.theta0 = 2.0 * out.theta_origin;
  for (int i = 0; i < s.n1; ++i) out.theta1.push_back(th[s.index(i, j0)] - 0.5 * out.theta_origin);
  for (int j = 0; j < s.n2; ++j) out.theta2.push_back(th[s.index(i0, j)] - 0.5 * out.theta_origin);

  const std::vector<double> t1 = detail::grid_partial(s, th, 1), t2 = detail::grid_partial(s, th, 2);
  const std::vector<double> t12 = detail::grid_partial(s, t1, 2);
  for (int j = 0; j < s.n2; ++j)
    for (int i = 0; i < s.n1; ++i) {
      const std::size_t n = s.index(i, j);
      const Quat &X = g.X[n], &Y = g.Y[n];
      auto A = [&](const Quat& z) { return Y * X.conj() * z; };
      const double c = std::cos(th[n]), sn = std::sin(th[n]);
      const Quat e2 = A(out.e1[n]);
      const Quat F = (d.X1[n] - d.X2[n]) * 0.5, G = (d.Y1[n] - d.Y2[n]) * 0.5;
      out.frame_residual = std::max({out.frame_residual, (D[n] - out.e1[n] * c).norm(), (E[n] - out.e1[n] * sn).norm(),
                                     (F + e2 * sn).norm(), (G - e2 * c).norm()});
      out.wave_residual = std::max(out.wave_residual, std::abs(t12[n]));
      out.split_residual = std::max(out.split_residual, std::abs(th[n] - out.theta1[i] - out.theta2[j]));
      const double k1 = dot(d.X11[n], A(d.X1[n])), k2 = dot(d.X22[n], A(d.X2[n]));
      out.curvature_residual = std::max({out.curvature_residual, std::abs(k1 + 2.0 * t1[n]), std::abs(k2 - 2.0 * t2[n])});
      const double c111 = dot(d.X11[n], d.Y1[n]) - dot(d.Y11[n], d.X1[n]);
      const double c222 = dot(d.X22[n], d.Y2[n]) - dot(d.Y22[n], d.X2[n]);
      out.cubic_residual = std::max({out.cubic_residual, std::abs(c111 + 4.0 * t1[n]), std::abs(c222 + 4.0 * t2[n])});
    }
  return out;
}

AsymptoticFrame asymptotic_frame(const ImmersionGrid& g, int i, int line) {
  validate_grid(g);
  const GridSpec& s = g.spec;
  if (i != 1 && i != 2) fail_input("direction", "direction must be 1 or 2");
  const int len = i == 1 ? s.n1 : s.n2;
  const int lines = i == 1 ? s.n2 : s.n1;
  if (line < 0 || line >= lines) fail_input("line", "line index out of range");
  if (len < 6) fail_math("under_resolved", "need at least 6 nodes along the line");
  const GridDerivatives d = grid_derivatives(g);
  AsymptoticFrame f;
  for (int k = 0; k < len; ++k) {
    const std::size_t n = i == 1 ? s.index(k, line) : s.index(line, k);
    const Quat &X = g.X[n], &Y = g.Y[n];
    const Quat& Xi = i == 1 ? d.X1[n] : d.X2[n];
    const Quat& Yi = i == 1 ? d.Y1[n] : d.Y2[n];
    const Quat& Xii = i == 1 ? d.X11[n] : d.X22[n];
    const Quat N = Y * X.conj() * Xi;
    const Quat dN = Yi * X.conj() * Xi + Y * Xi.conj() * Xi + Y * X.conj() * Xii;
    f.gamma.push_back(X);
    f.T.push_back(Xi);
    f.N.push_back(N);
    f.B.push_back(Y);
    f.kappa.push_back(dot(Xii, N));
    f.tau.push_back(dot(dN, Y));
    f.tridiagonal_residual = std::max(f.tridiagonal_residual, std::abs(dot(Xii, Y)));
  }
  return f;
}

namespace {

double poly(const std::vector<double>& c, double x) {
  double r = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

double poly_integral(const std::vector<double>& c, double x) {
  double r = 0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k] / static_cast<double>(k + 1);
  return r * x;
}

/// Integrates γ̇ = γ·u(t) (left) or u(t)·γ (right) from γ(0) = 1 onto the nodes t0 + k·h.
FactorCurve integrate_factor(const std::function<Quat(double)>& u, const std::function<Quat(double)>& du, double t0,
                             double h, int n, int origin, bool left) {
  FactorCurve f;
  f.t0 = t0;
  f.h = h;
  f.q.assign(n, Quat::one());
  const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(h) / 1e-3)));
  const double dt = h / sub;
  auto gen = [&](double t, const Quat&) { return u(t); };
  for (int k = origin; k + 1 < n; ++k) {
    Quat q = f.q[k];
    for (int m = 0; m < sub; ++m) q = detail::rkmk4_step(q, left, f.t(k) + m * dt, dt, gen);
    f.q[k + 1] = q;
  }
  for (int k = origin; k > 0; --k) {
    Quat q = f.q[k];
    for (int m = 0; m < sub; ++m) q = detail::rkmk4_step(q, left, f.t(k) - m * dt, -dt, gen);
    f.q[k - 1] = q;
  }
  for (int k = 0; k < n; ++k) {
    const Quat& q = f.q[k];
    const Quat v = u(f.t(k)), dv = du(f.t(k));
    f.dq.push_back(left ? q * v : v * q);
    f.ddq.push_back(left ? q * (v * v + dv) : (v * v + dv) * q);
  }
  return f;
}

}  // namespace

ImmersionGrid from_theta(double theta0, const std::vector<double>& f, const std::vector<double>& g, const GridSpec& spec) {
  if (!std::isfinite(theta0)) fail_input("theta0", "θ₀ must be finite");
  for (double c : f)
    if (!std::isfinite(c)) fail_input("polynomial", "coefficients must be finite");
  for (double c : g)
    if (!std::isfinite(c)) fail_input("polynomial", "coefficients must be finite");
  const Quat k = Quat::k(), i = Quat::i();
  // γ̇₁ = e^{ψk}·i·γ₁ with ψ = −2F; γ̇₂ = γ₂·e^{χk}·i with χ = θ₀ + 2G.
  auto u1 = [&](double x) { return exp_axis(k, -2.0 * poly_integral(f, x)) * i; };
  auto du1 = [&](double x) { return k * u1(x) * (-2.0 * poly(f, x)); };
  auto u2 = [&](double x) { return exp_axis(k, theta0 + 2.0 * poly_integral(g, x)) * i; };
  auto du2 = [&](double x) { return k * u2(x) * (2.0 * poly(g, x)); };
  Factorization fac;
  fac.a = Quat::one();
  fac.b = k;
  fac.g1 = integrate_factor(u1, du1, spec.x0, spec.h1(), spec.n1, spec.origin_i(), false);
  fac.g2 = integrate_factor(u2, du2, spec.y0, spec.h2(), spec.n2, spec.origin_j(), true);
  return construct(fac, spec);
}

ProjectionTest projection_immersion_test(const std::vector<double>& theta, double tol) {
  if (theta.empty()) fail_input("empty_theta", "no θ samples");
  ProjectionTest r;
  r.margin = std::numeric_limits<double>::infinity();
  const double q = M_PI / 2;
  for (double t : theta) r.margin = std::min(r.margin, std::abs(t - q * std::round(t / q)));
  r.immersed = r.margin > tol;
  return r;
}

}  // namespace bileg
