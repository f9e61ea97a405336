#include "bileg/cec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bileg/contact.hpp"
#include "bileg/error.hpp"
#include "numerics.hpp"

namespace bileg {

using Eigen::Matrix2d;
using Eigen::Vector4d;

double ambient_b(Ambient a, const Vector4d& u, const Vector4d& v) {
  const double s = u.head<3>().dot(v.head<3>());
  return a == Ambient::Hyperbolic ? s - u[3] * v[3] : s;
}

PatchGrid PatchGrid::make(double u0, double u1, int n1, double v0, double v1, int n2) {
  if (!std::isfinite(u0) || !std::isfinite(u1) || !std::isfinite(v0) || !std::isfinite(v1))
    fail_input("grid_range", "grid ranges must be finite");
  if (!(u1 > u0) || !(v1 > v0)) fail_input("grid_range", "grid ranges must be increasing");
  if (n1 < 2 || n2 < 2) fail_input("grid_steps", "each axis needs at least two nodes");
  return {u0, u1, n1, v0, v1, n2};
}

namespace {

void require_stencil(const PatchGrid& g) {
  if (g.n1 < 6 || g.n2 < 6) fail_math("under_resolved", "difference stencils need at least 6 nodes per axis");
}

template <class T>
std::vector<T> d1(const PatchGrid& g, const std::vector<T>& f, int dir) {
  std::vector<T> out(f.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      if (dir == 1)
        out[g.index(i, j)] = detail::stencil_d1<T>([&](int k) { return f[g.index(k, j)]; }, g.n1, i, g.h1());
      else
        out[g.index(i, j)] = detail::stencil_d1<T>([&](int k) { return f[g.index(i, k)]; }, g.n2, j, g.h2());
    }
  return out;
}

template <class T>
std::vector<T> d2(const PatchGrid& g, const std::vector<T>& f, int dir) {
  std::vector<T> out(f.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      if (dir == 1)
        out[g.index(i, j)] = detail::stencil_d2<T>([&](int k) { return f[g.index(k, j)]; }, g.n1, i, g.h1());
      else
        out[g.index(i, j)] = detail::stencil_d2<T>([&](int k) { return f[g.index(i, k)]; }, g.n2, j, g.h2());
    }
  return out;
}

}  // namespace

SurfacePatch SurfacePatch::sample(Ambient a, const PatchGrid& g,
                                  const std::function<std::pair<Vector4d, Vector4d>(double, double)>& f) {
  SurfacePatch s;
  s.ambient = a;
  s.grid = g;
  s.e.resize(g.size());
  s.nu.resize(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      auto [e, n] = f(g.u(i), g.v(j));
      if (!e.allFinite() || !n.allFinite()) fail_input("patch", "non-finite sample");
      if (a == Ambient::Euclidean && (e[3] != 0.0 || n[3] != 0.0))
        fail_input("patch", "euclidean samples must have zero fourth coordinate");
      s.e[g.index(i, j)] = e;
      s.nu[g.index(i, j)] = n;
    }
  if (s.invariant_residual() > 1e-9) fail_input("patch", "normal not unit, or point off the hyperboloid");
  return s;
}

double SurfacePatch::invariant_residual() const {
  double r = 0;
  for (std::size_t n = 0; n < e.size(); ++n) {
    r = std::max(r, std::abs(b(nu[n], nu[n]) - 1.0));
    if (ambient == Ambient::Hyperbolic) r = std::max({r, std::abs(b(e[n], e[n]) + 1.0), std::abs(b(e[n], nu[n]))});
  }
  return r;
}

SurfacePatch pseudosphere_patch(int n, double u0, double u1) {
  if (!(u0 > 0)) fail_input("pseudosphere_rim", "the pseudosphere is singular at u = 0; need u0 > 0");
  if (n < 6) fail_input("resolution", "need at least 6 nodes per axis");
  return SurfacePatch::sample(Ambient::Euclidean, PatchGrid::make(u0, u1, n, 0, M_PI, n), [](double u, double v) {
    const double sh = 1.0 / std::cosh(u), th = std::tanh(u);
    return std::pair{Vector4d(sh * std::cos(v), sh * std::sin(v), u - th, 0),
                     Vector4d(-th * std::cos(v), -th * std::sin(v), -sh, 0)};
  });
}

SurfacePatch hyperbolic_cylinder_patch(double r, int n) {
  if (!(r > 0) || !std::isfinite(r)) fail_input("radius", "cylinder radius must be positive");
  if (n < 6) fail_input("resolution", "need at least 6 nodes per axis");
  return SurfacePatch::sample(Ambient::Hyperbolic, PatchGrid::make(0, M_PI, n, -1, 1, n), [r](double phi, double s) {
    const double sr = std::sinh(r), cr = std::cosh(r);
    return std::pair{Vector4d(sr * std::cos(phi), sr * std::sin(phi), cr * std::sinh(s), cr * std::cosh(s)),
                     Vector4d(cr * std::cos(phi), cr * std::sin(phi), sr * std::sinh(s), sr * std::cosh(s))};
  });
}

SurfacePatch sphere_patch(double r, int n) {
  if (!(r > 0) || !std::isfinite(r)) fail_input("radius", "sphere radius must be positive");
  if (n < 6) fail_input("resolution", "need at least 6 nodes per axis");
  return SurfacePatch::sample(Ambient::Euclidean, PatchGrid::make(0.3, M_PI - 0.3, n, 0, M_PI, n),
                              [r](double t, double p) {
                                const Vector4d nu(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t), 0);
                                return std::pair{Vector4d(r * nu), nu};
                              });
}

FundamentalForms fundamental_forms(const SurfacePatch& s) {
  const PatchGrid& g = s.grid;
  require_stencil(g);
  const auto e1 = d1(g, s.e, 1), e2 = d1(g, s.e, 2), n1 = d1(g, s.nu, 1), n2 = d1(g, s.nu, 2);
  FundamentalForms f;
  const std::size_t N = g.size();
  for (std::size_t n = 0; n < N; ++n) {
    Matrix2d I, II, III;
    I << s.b(e1[n], e1[n]), s.b(e1[n], e2[n]), s.b(e2[n], e1[n]), s.b(e2[n], e2[n]);
    II << s.b(n1[n], e1[n]), s.b(n1[n], e2[n]), s.b(n2[n], e1[n]), s.b(n2[n], e2[n]);
    III << s.b(n1[n], n1[n]), s.b(n1[n], n2[n]), s.b(n2[n], n1[n]), s.b(n2[n], n2[n]);
    if (std::abs(I.determinant()) < 1e-14 * (1.0 + I.squaredNorm()))
      fail_math("degenerate_first_form", "first fundamental form is degenerate at a node");
    f.symmetry_residual = std::max(f.symmetry_residual, std::abs(II(0, 1) - II(1, 0)));
    II(0, 1) = II(1, 0) = 0.5 * (II(0, 1) + II(1, 0));
    const Matrix2d Iinv = I.inverse();
    const Matrix2d A = Iinv * II;
    f.third_form_residual = std::max(f.third_form_residual, (III - II * Iinv * II).cwiseAbs().maxCoeff());
    f.I.push_back(I);
    f.II.push_back(II);
    f.III.push_back(III);
    f.shape.push_back(A);
    f.det_shape.push_back(A.determinant());
  }
  return f;
}

GaussLift gauss_lift(const SurfacePatch& s, double k, int eta) {
  if (!(k > 0) || !std::isfinite(k)) fail_input("k", "k must be positive");
  if (eta == 0) eta = s.ambient == Ambient::Hyperbolic ? 1 : -1;
  if (eta != 1 && eta != -1) fail_input("eta", "eta must be ±1");
  const PatchGrid& g = s.grid;
  require_stencil(g);
  const FundamentalForms ff = fundamental_forms(s);
  const auto e1 = d1(g, s.e, 1), e2 = d1(g, s.e, 2), n1 = d1(g, s.nu, 1), n2 = d1(g, s.nu, 2);
  const double rk = std::sqrt(k);
  const AmbientForm4 form = AmbientForm4::lorentzian(eta);
  const Eigen::Matrix4d B =
      s.ambient == Ambient::Hyperbolic ? form.matrix() : Eigen::Vector4d(1, 1, 1, 0).asDiagonal().toDenseMatrix();

  GaussLift out;
  out.eta = eta;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vector4d x = s.e[n], y = s.nu[n] / rk;
    out.x.push_back(x);
    out.y.push_back(y);
    out.membership_residual = std::max(out.membership_residual, std::abs(s.b(s.nu[n], s.nu[n]) - 1.0));
    if (s.ambient == Ambient::Hyperbolic)
      out.membership_residual =
          std::max({out.membership_residual, std::abs(s.b(x, x) + 1.0), std::abs(s.b(x, s.nu[n]))});

    Mat8 I, K, G;
    const Eigen::Matrix4d Id = Eigen::Matrix4d::Identity(), Z = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d A = Z;
    if (s.ambient == Ambient::Hyperbolic) {
      A = frame_at(form, BasePoint::make(form, x, y)).A;
    } else {
      // Rotation by a right angle on ν^⊥ ⊂ R³.
      const Eigen::Vector3d u = s.nu[n].head<3>();
      A.topLeftCorner<3, 3>() << 0, -u[2], u[1], u[2], 0, -u[0], -u[1], u[0], 0;
    }
    I << Z, Id, -eta * Id, Z;
    K << A, Z, Z, -A;
    G << B, Z, Z, eta * B;

    Vec8 t1, t2;
    t1 << e1[n], n1[n] / rk;
    t2 << e2[n], n2[n] / rk;
    const double scale = t1.norm() * t2.norm();
    for (const Vec8* t : {&t1, &t2}) {
      const Vector4d xi = t->head<4>(), mu = t->tail<4>();
      double w = std::max(std::abs(s.b(xi, s.nu[n])), std::abs(s.b(mu, s.nu[n])) * rk);
      if (s.ambient == Ambient::Hyperbolic) w = std::max({w, std::abs(s.b(xi, x)), std::abs(s.b(mu, x))});
      out.w_residual = std::max(out.w_residual, w / t->norm());
    }
    out.omega_i_residual = std::max(out.omega_i_residual, std::abs(t1.dot(G * I * t2)) / scale);
    out.omega_k_residual = std::max(out.omega_k_residual, std::abs(t1.dot(G * K * t2)) / scale);

    const Matrix2d& S = ff.shape[n];
    const Vector4d p1 = e1[n] * S(0, 0) + e2[n] * S(1, 0), p2 = e1[n] * S(0, 1) + e2[n] * S(1, 1);
    const double dn = std::max(n1[n].norm(), n2[n].norm()) + 1e-300;
    out.derivative_residual = std::max({out.derivative_residual, (n1[n] - p1).norm() / dn, (n2[n] - p2).norm() / dn});
  }
  return out;
}

std::vector<double> brioschi_curvature(const PatchGrid& g, const std::vector<double>& E, const std::vector<double>& F,
                                       const std::vector<double>& G) {
  require_stencil(g);
  const auto Eu = d1(g, E, 1), Ev = d1(g, E, 2), Fu = d1(g, F, 1), Fv = d1(g, F, 2);
  const auto Gu = d1(g, G, 1), Gv = d1(g, G, 2);
  const auto Evv = d2(g, E, 2), Guu = d2(g, G, 1), Fuv = d1(g, Fu, 2);
  std::vector<double> K(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * Evv[n] + Fuv[n] - 0.5 * Guu[n], 0.5 * Eu[n], Fu[n] - 0.5 * Ev[n],  //
        Fv[n] - 0.5 * Gu[n], E[n], F[n],                                              //
        0.5 * Gv[n], F[n], G[n];
    m2 << 0, 0.5 * Ev[n], 0.5 * Gu[n],  //
        0.5 * Ev[n], E[n], F[n],        //
        0.5 * Gu[n], F[n], G[n];
    const double det = E[n] * G[n] - F[n] * F[n];
    K[n] = (m1.determinant() - m2.determinant()) / (det * det);
  }
  return K;
}

FlatMetric flat_metric(const SurfacePatch& s, double k, int sign, double cec_tol, int margin) {
  if (!(k > 0) || !std::isfinite(k)) fail_input("k", "k must be positive");
  if (sign != 1 && sign != -1) fail_input("sign", "sign must be ±1");
  const PatchGrid& g = s.grid;
  const FundamentalForms ff = fundamental_forms(s);
  const auto e1 = d1(g, s.e, 1), e2 = d1(g, s.e, 2);
  FlatMetric out;
  const double target = -sign * k;
  for (double d : ff.det_shape) out.cec_residual = std::max(out.cec_residual, std::abs(d - target));
  if (out.cec_residual > cec_tol) fail_math("not_cec", "extrinsic curvature differs from the required constant");

  const std::size_t N = g.size();
  std::vector<double> E(N), F(N), G(N);
  const int eta = -sign;
  for (std::size_t n = 0; n < N; ++n) {
    const Matrix2d h = ff.I[n] + (sign / k) * ff.III[n];
    out.h.push_back(h);
    E[n] = h(0, 0);
    F[n] = 0.5 * (h(0, 1) + h(1, 0));
    G[n] = h(1, 1);
    const Matrix2d& A = ff.shape[n];
    const double tr = A.trace(), disc = 0.25 * tr * tr - A.determinant();
    const double l1 = 0.5 * tr + std::sqrt(std::abs(disc)), l2 = 0.5 * tr - std::sqrt(std::abs(disc));
    out.umbilic.push_back(sign < 0 && std::abs(l1 - l2) < 1e-4 * (std::abs(l1) + std::abs(l2) + 1.0));

    // ê_k*g^{−η}(∂_a, ∂_b) = b(∂_a e, ∂_b e) − (η/k)·b(de·A∂_a, de·A∂_b).
    const Vector4d a1 = e1[n] * A(0, 0) + e2[n] * A(1, 0), a2 = e1[n] * A(0, 1) + e2[n] * A(1, 1);
    Matrix2d pb;
    pb << s.b(e1[n], e1[n]) - eta / k * s.b(a1, a1), s.b(e1[n], e2[n]) - eta / k * s.b(a1, a2),
        s.b(e2[n], e1[n]) - eta / k * s.b(a2, a1), s.b(e2[n], e2[n]) - eta / k * s.b(a2, a2);
    out.pullback_residual = std::max(out.pullback_residual, (pb - h).cwiseAbs().maxCoeff());
  }

  std::vector<bool> skip(N, false);
  for (std::size_t n = 0; n < N; ++n) {
    const double det = E[n] * G[n] - F[n] * F[n];
    skip[n] = out.umbilic[n] || std::abs(det) < 1e-12;
  }
  const std::vector<double> K = brioschi_curvature(g, E, F, G);
  out.curvature.assign(N, std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t n = g.index(i, j);
      if (skip[n]) continue;
      out.curvature[n] = K[n];
      if (i >= margin && j >= margin && i < g.n1 - margin && j < g.n2 - margin)
        out.curvature_max = std::max(out.curvature_max, std::abs(K[n]));
    }
  return out;
}

ThetaGrid ThetaGrid::sample(const PatchGrid& g, const std::function<double(double, double)>& f, double k, double c) {
  if (!std::isfinite(k) || !std::isfinite(c)) fail_input("constants", "k and c must be finite");
  ThetaGrid t;
  t.grid = g;
  t.k = k;
  t.c = c;
  t.theta.resize(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double v = f(g.u(i), g.v(j));
      if (!std::isfinite(v)) fail_input("theta", "non-finite θ sample");
      t.theta[g.index(i, j)] = v;
    }
  return t;
}

ThetaGrid ThetaGrid::sample_null(double R, int n, const std::function<double(double, double)>& theta_xy, double k,
                                 double c) {
  if (!(R > 0)) fail_input("radius", "R must be positive");
  return sample(PatchGrid::make(-R, R, n, -R, R, n),
                [&](double u, double v) { return theta_xy(0.5 * (u + v), 0.5 * (u - v)); }, k, c);
}

FundamentalForms chebyshev_forms(const ThetaGrid& t) {
  if (!(t.k > 0)) fail_input("k", "k must be positive");
  const double r = std::sqrt(t.k);
  FundamentalForms f;
  for (double th : t.theta) {
    if (!(th > 0 && th < M_PI / 2)) fail_input("theta_range", "θ must lie in (0, π/2)");
    const ChebyshevPoint<double> p = chebyshev_point(std::cos(th), std::sin(th), r);
    Matrix2d I, II, III;
    I << p.I[0][0], p.I[0][1], p.I[1][0], p.I[1][1];
    II << p.II[0][0], p.II[0][1], p.II[1][0], p.II[1][1];
    III << p.III[0][0], p.III[0][1], p.III[1][0], p.III[1][1];
    const Matrix2d Iinv = I.inverse(), A = Iinv * II;
    f.third_form_residual = std::max(f.third_form_residual, (III - II * Iinv * II).cwiseAbs().maxCoeff());
    f.I.push_back(I);
    f.II.push_back(II);
    f.III.push_back(III);
    f.shape.push_back(A);
    f.det_shape.push_back(II.determinant() / I.determinant());
  }
  return f;
}

SineGordonResidual sine_gordon_residual(const ThetaGrid& t) {
  const PatchGrid& g = t.grid;
  require_stencil(g);
  const auto txx = d2(g, t.theta, 1), tyy = d2(g, t.theta, 2);
  SineGordonResidual r;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double th = t.theta[n];
    const double wave = txx[n] - tyy[n];
    r.equation.push_back(wave - 0.5 * (t.k - t.c) * std::sin(2.0 * th));
    // Oriented area of the frame (cos θ·dx, sin θ·dy) of the first form.
    const double area = std::cos(th) * std::sin(th);
    r.area_form.push_back(wave - (t.k - t.c) * area);
    r.max_equation = std::max(r.max_equation, std::abs(r.equation.back()));
    r.max_area_form = std::max(r.max_area_form, std::abs(r.area_form.back()));
  }
  return r;
}

HazzidakiReport hazzidaki(const ThetaGrid& t) {
  const PatchGrid& g = t.grid;
  require_stencil(g);
  const auto tuv = d1(g, d1(g, t.theta, 1), 2);
  auto weights = [](int n, double h) {
    std::vector<double> w(n, h);
    if (n % 2 == 1) {
      for (int i = 0; i < n; ++i) w[i] = h / 3.0 * (i == 0 || i == n - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0));
    } else {
      w.front() = w.back() = 0.5 * h;
    }
    return w;
  };
  const auto w1 = weights(g.n1, g.h1()), w2 = weights(g.n2, g.h2());
  double scale = 0, theta_max = 0;
  for (double v : tuv) scale = std::max(scale, std::abs(v));
  for (double v : t.theta) theta_max = std::max(theta_max, std::abs(v));
  // Below this the mixed difference is rounding noise of the stencil.
  const double noise = 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + theta_max) / (g.h1() * g.h2());
  const double zero = std::max(1e-9 * scale, noise);
  bool pos = false, neg = false;
  HazzidakiReport r;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double v = tuv[g.index(i, j)];
      pos = pos || v > zero;
      neg = neg || v < -zero;
      r.lhs += 2.0 * std::abs(v) * w1[i] * w2[j];
    }
  const auto th = [&](int i, int j) { return t.theta[g.index(i, j)]; };
  const int a = g.n1 - 1, b = g.n2 - 1;
  r.corner_sum = 2.0 * std::abs(th(a, b) - th(a, 0) - th(0, b) + th(0, 0));
  const auto [mn, mx] = std::minmax_element(t.theta.begin(), t.theta.end());
  r.rhs = 4.0 * (*mx - *mn);
  r.sign_constant = !(pos && neg);
  r.holds = r.sign_constant && r.lhs <= r.rhs + 1e-12;
  return r;
}

}  // namespace bileg
