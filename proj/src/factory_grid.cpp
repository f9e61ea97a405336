#include <algorithm>
#include <cmath>

#include "bileg/error.hpp"
#include "bileg/factory.hpp"
#include "factory_detail.hpp"
#include "lie.hpp"
#include "numerics.hpp"

namespace bileg {

namespace {

int origin_index(double lo, double step, int n, const char* axis) {
  const double r = -lo / step;
  const double k = std::round(r);
  if (k < 0 || k > n - 1 || std::abs(r - k) > 1e-9)
    fail_input("grid_origin", std::string("the origin is not a node along ") + axis);
  return static_cast<int>(k);
}

}  // namespace

GridSpec GridSpec::make(double x0, double x1, int n1, double y0, double y1, int n2) {
  if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) || !std::isfinite(y1))
    fail_input("grid_range", "grid ranges must be finite");
  if (n1 < 2 || n2 < 2) fail_input("grid_steps", "each axis needs at least two nodes");
  if (!(x1 > x0) || !(y1 > y0)) fail_input("grid_range", "grid ranges must be increasing");
  GridSpec s{x0, x1, n1, y0, y1, n2};
  s.origin_i();
  s.origin_j();
  return s;
}

int GridSpec::origin_i() const { return origin_index(x0, h1(), n1, "x1"); }
int GridSpec::origin_j() const { return origin_index(y0, h2(), n2, "x2"); }

namespace detail {

Quat hermite(const std::vector<Quat>& q, const std::vector<Quat>& dq, double t0, double h, double t) {
  if (q.size() < 2) return q.at(0);
  const double u = (t - t0) / h;
  const int n = std::clamp(static_cast<int>(std::floor(u)), 0, static_cast<int>(q.size()) - 2);
  const double s = u - n;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return q[n] * h00 + dq[n] * (h10 * h) + q[n + 1] * h01 + dq[n + 1] * (h11 * h);
}

std::vector<Quat> stencil_derivative(const std::vector<Quat>& q, double h) {
  const int n = static_cast<int>(q.size());
  if (n < 5) fail_input("too_few_samples", "need at least five samples for derivatives");
  std::vector<Quat> d(n);
  auto get = [&](int k) { return q[k]; };
  for (int k = 0; k < n; ++k) d[k] = stencil_d1<Quat>(get, n, k, h);
  return d;
}

Quat sample_cubic(const std::vector<Quat>& v, double t0, double h, double t) {
  const int n = static_cast<int>(v.size());
  const double u = (t - t0) / h;
  if (n < 4) {
    const int k = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(0, n - 2));
    const double s = n < 2 ? 0.0 : u - k;
    return n < 2 ? v[0] : v[k] * (1 - s) + v[k + 1] * s;
  }
  const int k = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  Quat r;
  for (int a = 0; a < 4; ++a) {
    double w = 1;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (u - (k + b)) / static_cast<double>(a - b);
    r += v[k + a] * w;
  }
  return r;
}

}  // namespace detail

std::vector<Quat> FactorCurve::first_derivative() const {
  if (dq.size() == q.size()) return dq;
  return detail::stencil_derivative(q, h);
}

Quat FactorCurve::at(double t) const {
  if (q.empty()) fail_input("empty_factor", "factor has no samples");
  return detail::hermite(q, first_derivative(), t0, h, t).normalized();
}

FactorCurve exp_factor(const Quat& u, double t0, double h, int n) {
  if (n < 1) fail_input("factor_samples", "need at least one sample");
  FactorCurve f;
  f.t0 = t0;
  f.h = h;
  const Quat uu = u.imag();
  for (int k = 0; k < n; ++k) {
    const Quat g = qexp(uu * f.t(k));
    f.q.push_back(g);
    f.dq.push_back(g * uu);
    f.ddq.push_back(g * uu * uu);
  }
  return f;
}

double grid_invariant_residual(const ImmersionGrid& g) {
  double r = 0;
  for (std::size_t n = 0; n < g.X.size(); ++n) {
    r = std::max(r, std::abs(g.X[n].norm() - 1.0));
    r = std::max(r, std::abs(g.Y[n].norm() - 1.0));
    r = std::max(r, std::abs(dot(g.X[n], g.Y[n])));
  }
  return r;
}

void validate_grid(const ImmersionGrid& g) {
  if (g.X.size() != g.spec.size() || g.Y.size() != g.spec.size())
    fail_input("grid_shape", "sample count does not match the grid steps");
  if (grid_invariant_residual(g) > 1e-9) fail_math("grid_invariant", "samples are not orthonormal pairs of unit quaternions");
}

namespace {

bool analytic_factors(const ImmersionGrid& g) {
  return g.factors && g.factors->g1.has_derivatives() && g.factors->g2.has_derivatives() &&
         g.factors->g1.q.size() == static_cast<std::size_t>(g.spec.n1) &&
         g.factors->g2.q.size() == static_cast<std::size_t>(g.spec.n2);
}

/// Fourth-order derivative of a grid field along x₁ (dir = 1) or x₂ (dir = 2).
std::vector<Quat> grid_d1(const GridSpec& s, const std::vector<Quat>& f, int dir) {
  std::vector<Quat> out(f.size());
  for (int j = 0; j < s.n2; ++j)
    for (int i = 0; i < s.n1; ++i) {
      if (dir == 1) {
        auto get = [&](int k) { return f[s.index(k, j)]; };
        out[s.index(i, j)] = detail::stencil_d1<Quat>(get, s.n1, i, s.h1());
      } else {
        auto get = [&](int k) { return f[s.index(i, k)]; };
        out[s.index(i, j)] = detail::stencil_d1<Quat>(get, s.n2, j, s.h2());
      }
    }
  return out;
}

std::vector<Quat> grid_d2(const GridSpec& s, const std::vector<Quat>& f, int dir) {
  std::vector<Quat> out(f.size());
  for (int j = 0; j < s.n2; ++j)
    for (int i = 0; i < s.n1; ++i) {
      if (dir == 1) {
        auto get = [&](int k) { return f[s.index(k, j)]; };
        out[s.index(i, j)] = detail::stencil_d2<Quat>(get, s.n1, i, s.h1());
      } else {
        auto get = [&](int k) { return f[s.index(i, k)]; };
        out[s.index(i, j)] = detail::stencil_d2<Quat>(get, s.n2, j, s.h2());
      }
    }
  return out;
}

}  // namespace

namespace detail {

void require_fd_grid(const GridSpec& s) {
  if (s.n1 < 6 || s.n2 < 6) fail_input("grid_too_small", "finite differences need at least 6 nodes per axis");
}

std::vector<Quat> grid_partial(const GridSpec& s, const std::vector<Quat>& f, int dir) { return grid_d1(s, f, dir); }

std::vector<double> grid_partial(const GridSpec& s, const std::vector<double>& f, int dir) {
  std::vector<double> out(f.size());
  for (int j = 0; j < s.n2; ++j)
    for (int i = 0; i < s.n1; ++i) {
      if (dir == 1) {
        auto get = [&](int k) { return f[s.index(k, j)]; };
        out[s.index(i, j)] = stencil_d1<double>(get, s.n1, i, s.h1());
      } else {
        auto get = [&](int k) { return f[s.index(i, k)]; };
        out[s.index(i, j)] = stencil_d1<double>(get, s.n2, j, s.h2());
      }
    }
  return out;
}

}  // namespace detail

GridDerivatives grid_derivatives(const ImmersionGrid& g) {
  const GridSpec& s = g.spec;
  GridDerivatives d;
  if (analytic_factors(g)) {
    const Factorization& f = *g.factors;
    const std::size_t N = s.size();
    for (auto* v : {&d.X1, &d.X2, &d.Y1, &d.Y2, &d.X11, &d.X12, &d.X22, &d.Y11, &d.Y12, &d.Y22}) v->resize(N);
    for (int j = 0; j < s.n2; ++j)
      for (int i = 0; i < s.n1; ++i) {
        const std::size_t n = s.index(i, j);
        const Quat &g1 = f.g1.q[i], &d1 = f.g1.dq[i], &dd1 = f.g1.ddq[i];
        const Quat &g2 = f.g2.q[j], &d2 = f.g2.dq[j], &dd2 = f.g2.ddq[j];
        for (int c = 0; c < 2; ++c) {
          const Quat& m = c == 0 ? f.a : f.b;
          auto& D1 = c == 0 ? d.X1 : d.Y1;
          auto& D2 = c == 0 ? d.X2 : d.Y2;
          auto& D11 = c == 0 ? d.X11 : d.Y11;
          auto& D12 = c == 0 ? d.X12 : d.Y12;
          auto& D22 = c == 0 ? d.X22 : d.Y22;
          D1[n] = g2 * m * d1;
          D2[n] = d2 * m * g1;
          D11[n] = g2 * m * dd1;
          D12[n] = d2 * m * d1;
          D22[n] = dd2 * m * g1;
        }
      }
    d.analytic = true;
    return d;
  }
  detail::require_fd_grid(s);
  d.X1 = grid_d1(s, g.X, 1);
  d.X2 = grid_d1(s, g.X, 2);
  d.Y1 = grid_d1(s, g.Y, 1);
  d.Y2 = grid_d1(s, g.Y, 2);
  d.X11 = grid_d2(s, g.X, 1);
  d.X22 = grid_d2(s, g.X, 2);
  d.Y11 = grid_d2(s, g.Y, 1);
  d.Y22 = grid_d2(s, g.Y, 2);
  d.X12 = grid_d1(s, d.X1, 2);
  d.Y12 = grid_d1(s, d.Y1, 2);
  return d;
}

namespace {

void check_factor_sampling(const FactorCurve& f, double t0, double h, int n, const char* which) {
  if (f.q.size() != static_cast<std::size_t>(n) || std::abs(f.t0 - t0) > 1e-12 * (1 + std::abs(t0)) ||
      std::abs(f.h - h) > 1e-12 * std::abs(h))
    fail_input("factor_grid", std::string(which) + " is not sampled on the grid axis");
}

double horizontality(const FactorCurve& f, const Quat& axis, bool right) {
  const std::vector<Quat> d = f.first_derivative();
  double r = 0;
  for (std::size_t k = 0; k < f.q.size(); ++k)
    r = std::max(r, std::abs(dot(d[k], right ? axis * f.q[k] : f.q[k] * axis)) / std::max(1.0, d[k].norm()));
  return r;
}

}  // namespace

ImmersionGrid construct(const Factorization& f, const GridSpec& spec) {
  if (std::abs(f.a.norm() - 1) > 1e-9 || std::abs(f.b.norm() - 1) > 1e-9) fail_math("not_unit", "a and b must be unit quaternions");
  if (std::abs(dot(f.a, f.b)) > 1e-9) fail_math("not_orthogonal", "a and b must be orthogonal");
  check_factor_sampling(f.g1, spec.x0, spec.h1(), spec.n1, "γ₁");
  check_factor_sampling(f.g2, spec.y0, spec.h2(), spec.n2, "γ₂");
  const int i0 = spec.origin_i(), j0 = spec.origin_j();
  if (distance(f.g1.q[i0], Quat::one()) > 1e-9 || distance(f.g2.q[j0], Quat::one()) > 1e-9)
    fail_math("factor_base", "factors must equal 1 at the origin");
  for (const auto& q : f.g1.q)
    if (std::abs(q.norm() - 1) > 1e-9) fail_math("not_unit", "γ₁ leaves S³");
  for (const auto& q : f.g2.q)
    if (std::abs(q.norm() - 1) > 1e-9) fail_math("not_unit", "γ₂ leaves S³");
  const double tol1 = f.g1.dq.size() == f.g1.q.size() ? 1e-7 : 1e-5;
  const double tol2 = f.g2.dq.size() == f.g2.q.size() ? 1e-7 : 1e-5;
  if (horizontality(f.g1, f.axis1(), true) > tol1) fail_math("not_horizontal", "γ₁ is not right (ā·b)-horizontal");
  if (horizontality(f.g2, f.axis2(), false) > tol2) fail_math("not_horizontal", "γ₂ is not left (b·ā)-horizontal");

  ImmersionGrid g;
  g.spec = spec;
  g.X.resize(spec.size());
  g.Y.resize(spec.size());
  for (int j = 0; j < spec.n2; ++j)
    for (int i = 0; i < spec.n1; ++i) {
      g.X[spec.index(i, j)] = f.g2.q[j] * f.a * f.g1.q[i];
      g.Y[spec.index(i, j)] = f.g2.q[j] * f.b * f.g1.q[i];
    }
  g.factors = f;
  return g;
}

double ResidualReport::max() const {
  double m = 0;
  for (const auto& e : entries) m = std::max(m, e.value);
  return m;
}

double ResidualReport::get(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e.value;
  fail_input("unknown_residual", name);
}

ResidualReport residual_suite(const ImmersionGrid& g) {
  if (g.X.size() != g.spec.size() || g.Y.size() != g.spec.size())
    fail_input("grid_shape", "sample count does not match the grid steps");
  const GridDerivatives d = grid_derivatives(g);
  double pointwise = grid_invariant_residual(g);
  double tangency = 0, omega_i = 0, omega_k = 0, metric = 0, speed = 0, tr1 = 0, tr2 = 0, pc1 = 0, pc2 = 0;
  double c122 = 0, c211 = 0, chat = 0, tau1 = 0, tau2 = 0, tridiag = 0;
  auto upd = [](double& m, double v) { m = std::max(m, std::abs(v)); };
  for (std::size_t n = 0; n < g.spec.size(); ++n) {
    const Quat &X = g.X[n], &Y = g.Y[n];
    const Quat Xb = X.conj();
    const Quat &X1 = d.X1[n], &X2 = d.X2[n], &Y1 = d.Y1[n], &Y2 = d.Y2[n];
    const Quat &X11 = d.X11[n], &X12 = d.X12[n], &X22 = d.X22[n];
    const Quat &Y11 = d.Y11[n], &Y12 = d.Y12[n], &Y22 = d.Y22[n];
    auto A = [&](const Quat& z) { return Y * Xb * z; };
    for (const Quat* dX : {&X1, &X2}) {
      upd(tangency, dot(*dX, X));
      upd(tangency, dot(*dX, Y));
    }
    for (const Quat* dY : {&Y1, &Y2}) {
      upd(tangency, dot(*dY, X));
      upd(tangency, dot(*dY, Y));
    }
    upd(omega_i, dot(X1, Y2) - dot(Y1, X2));
    upd(omega_k, dot(X1, A(X2)) + dot(Y1, A(Y2)));
    upd(metric, dot(X1, X1) + dot(Y1, Y1) - 2.0);
    upd(metric, dot(X2, X2) + dot(Y2, Y2) - 2.0);
    upd(metric, dot(X1, X2) + dot(Y1, Y2));
    upd(speed, dot(X1, X1) - 1.0);
    upd(speed, dot(X2, X2) - 1.0);
    tr1 = std::max(tr1, (Y1 * Xb + Y * X1.conj()).norm());
    tr2 = std::max(tr2, (X2.conj() * Y + Xb * Y2).norm());
    pc1 = std::max(pc1, (X2.conj() * X1 + Xb * X12).norm());
    pc2 = std::max(pc2, (X12 * Xb + X2 * X1.conj()).norm());
    upd(c122, dot(X12, Y2) - dot(Y12, X2));
    upd(c211, dot(X12, Y1) - dot(Y12, X1));
    upd(chat, dot(X11, Y1) + dot(Y11, X1));
    upd(chat, dot(X12, Y1) + dot(Y12, X1));
    upd(chat, dot(X12, Y2) + dot(Y12, X2));
    upd(chat, dot(X22, Y2) + dot(Y22, X2));
    upd(tau1, -dot(A(X1), Y1) + 1.0);
    upd(tau2, -dot(A(X2), Y2) - 1.0);
    upd(tridiag, dot(X11, Y));
    upd(tridiag, dot(X22, Y));
  }
  ResidualReport r;
  r.analytic = d.analytic;
  r.entries = {{"pointwise", pointwise},     {"w_tangency", tangency}, {"omega_i", omega_i},
               {"omega_k", omega_k},         {"metric", metric},       {"unit_speed", speed},
               {"transport_1", tr1},         {"transport_2", tr2},     {"product_1", pc1},
               {"product_2", pc2},           {"cubic_c122", c122},     {"cubic_c211", c211},
               {"cubic_hat", chat},          {"torsion_1", tau1},      {"torsion_2", tau2},
               {"tridiagonal", tridiag}};
  return r;
}

LieFactorization lie_factorize(const GridSpec& s, const std::vector<Quat>& M, double criterion_tol) {
  if (M.size() != s.size()) fail_input("grid_shape", "sample count does not match the grid steps");
  for (const auto& m : M)
    if (std::abs(m.norm() - 1.0) > 1e-9) fail_input("not_unit", "samples must be unit quaternions");
  detail::require_fd_grid(s);
  const std::vector<Quat> M1 = grid_d1(s, M, 1), M2 = grid_d1(s, M, 2), M12 = grid_d1(s, M1, 2);
  LieFactorization out;
  for (std::size_t n = 0; n < M.size(); ++n) {
    const Quat Mb = M[n].conj();
    out.criterion_left = std::max(out.criterion_left, (M2[n].conj() * M1[n] + Mb * M12[n]).norm());
    out.criterion_right = std::max(out.criterion_right, (M12[n] * Mb + M2[n] * M1[n].conj()).norm());
  }
  if (std::max(out.criterion_left, out.criterion_right) > criterion_tol)
    fail_math("not_factorizable", "the product criterion fails: M is not of the form B·C·A");

  const int i0 = s.origin_i(), j0 = s.origin_j();
  std::vector<Quat> alpha(s.n1), beta(s.n2);
  for (int i = 0; i < s.n1; ++i) alpha[i] = (M[s.index(i, j0)].conj() * M1[s.index(i, j0)]).imag();
  for (int j = 0; j < s.n2; ++j) beta[j] = (M2[s.index(i0, j)] * M[s.index(i0, j)].conj()).imag();

  auto integrate = [](const std::vector<Quat>& gen, double t0, double h, int start, bool left) {
    const int n = static_cast<int>(gen.size());
    FactorCurve f;
    f.t0 = t0;
    f.h = h;
    f.q.assign(n, Quat::one());
    auto u = [&](double t, const Quat&) { return detail::sample_cubic(gen, t0, h, t); };
    for (int k = start; k + 1 < n; ++k) f.q[k + 1] = detail::rkmk4_step(f.q[k], left, t0 + k * h, h, u);
    for (int k = start; k > 0; --k) f.q[k - 1] = detail::rkmk4_step(f.q[k], left, t0 + k * h, -h, u);
    f.dq.resize(n);
    for (int k = 0; k < n; ++k) f.dq[k] = left ? f.q[k] * gen[k] : gen[k] * f.q[k];
    return f;
  };
  out.A = integrate(alpha, s.x0, s.h1(), i0, true);
  out.B = integrate(beta, s.y0, s.h2(), j0, false);
  out.C = out.B.q[j0].conj() * M[s.index(i0, j0)] * out.A.q[i0].conj();
  for (int j = 0; j < s.n2; ++j)
    for (int i = 0; i < s.n1; ++i)
      out.reconstruction = std::max(out.reconstruction, distance(out.B.q[j] * out.C * out.A.q[i], M[s.index(i, j)]));
  return out;
}

FactorizeResult factorize(const ImmersionGrid& g, double tol) {
  validate_grid(g);
  const GridSpec& s = g.spec;
  const int i0 = s.origin_i(), j0 = s.origin_j();
  FactorizeResult r;
  Factorization& f = r.factors;
  f.a = g.x_at(i0, j0);
  f.b = g.y_at(i0, j0);
  const Quat ab = f.a.conj();
  f.g1.t0 = s.x0;
  f.g1.h = s.h1();
  f.g2.t0 = s.y0;
  f.g2.h = s.h2();
  for (int i = 0; i < s.n1; ++i) f.g1.q.push_back(ab * g.x_at(i, j0));
  for (int j = 0; j < s.n2; ++j) f.g2.q.push_back(g.x_at(i0, j) * ab);
  f.g1.q[i0] = Quat::one();
  f.g2.q[j0] = Quat::one();
  for (int j = 0; j < s.n2; ++j)
    for (int i = 0; i < s.n1; ++i) {
      r.reconstruction = std::max(r.reconstruction, distance(f.g2.q[j] * f.a * f.g1.q[i], g.x_at(i, j)));
      r.reconstruction = std::max(r.reconstruction, distance(f.g2.q[j] * f.b * f.g1.q[i], g.y_at(i, j)));
    }
  if (r.reconstruction > tol) fail_math("not_bilegendrian", "grid is not a product γ₂·(a, b)·γ₁");
  if (s.n1 >= 6 && s.n2 >= 6) {
    const GridDerivatives d = grid_derivatives(g);
    for (int i = 0; i < s.n1; ++i) {
      f.g1.dq.push_back(ab * d.X1[s.index(i, j0)]);
      f.g1.ddq.push_back(ab * d.X11[s.index(i, j0)]);
    }
    for (int j = 0; j < s.n2; ++j) {
      f.g2.dq.push_back(d.X2[s.index(i0, j)] * ab);
      f.g2.ddq.push_back(d.X22[s.index(i0, j)] * ab);
    }
  }
  if (f.g1.q.size() >= 5) r.horizontality1 = horizontality(f.g1, f.axis1(), true);
  if (f.g2.q.size() >= 5) r.horizontality2 = horizontality(f.g2, f.axis2(), false);
  if (std::max(r.horizontality1, r.horizontality2) > 1e-5)
    fail_math("not_horizontal", "recovered factors are not horizontal; input is not bilegendrian");
  return r;
}

}  // namespace bileg
