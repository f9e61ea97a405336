#include "bileg/contact.hpp"

#include <algorithm>
#include <cmath>

#include "bileg/error.hpp"
#include "numerics.hpp"

namespace bileg {

AmbientForm4 AmbientForm4::make(const Vec4& sigma, int eta) {
  for (int i = 0; i < 4; ++i)
    if (sigma[i] != 1.0 && sigma[i] != -1.0) fail_input("ambient_form", "diagonal entries must be +1 or -1");
  if (eta != 1 && eta != -1) fail_input("ambient_form", "eta must be +1 or -1");
  return {sigma, eta};
}

double base_point_residual(const AmbientForm4& form, const Vec4& x, const Vec4& y) {
  const double scale = std::max(1e-300, x.norm() * y.norm());
  return std::abs(form.b(x, y)) / scale;
}

BasePoint BasePoint::make(const AmbientForm4& form, const Vec4& x, const Vec4& y) {
  if (!x.allFinite() || !y.allFinite()) fail_input("base_point", "non-finite coordinates");
  if (std::abs(form.b(x, x)) <= 1e-12 * x.squaredNorm() || std::abs(form.b(y, y)) <= 1e-12 * y.squaredNorm())
    fail_math("not_in_M", "b(x,x) and b(y,y) must be nonzero");
  if (base_point_residual(form, x, y) > 1e-10) fail_math("not_in_M", "b(x,y) must vanish");
  return {x, y};
}

Vec8 ContactVector::stacked() const {
  Vec8 v;
  v << xi, mu;
  return v;
}

ContactVector ContactVector::from_stacked(const Vec8& v) { return {v.head<4>(), v.tail<4>()}; }

static Vec4 project_component(const AmbientForm4& form, const BasePoint& p, const Vec4& v) {
  return v - (form.b(v, p.x) / form.b(p.x, p.x)) * p.x - (form.b(v, p.y) / form.b(p.y, p.y)) * p.y;
}

ContactVector w_project(const AmbientForm4& form, const BasePoint& p, const Vec8& v) {
  return {project_component(form, p, v.head<4>()), project_component(form, p, v.tail<4>())};
}

double w_residual(const AmbientForm4& form, const BasePoint& p, const Vec8& v) {
  const Vec4 xi = v.head<4>(), mu = v.tail<4>();
  const double sx = p.x.norm(), sy = p.y.norm();
  return std::max({std::abs(form.b(xi, p.x)) / sx, std::abs(form.b(xi, p.y)) / sy, std::abs(form.b(mu, p.x)) / sx,
                   std::abs(form.b(mu, p.y)) / sy});
}

double StructureFrame::vol(const Vec4& a, const Vec4& b) const {
  Eigen::Matrix4d m;
  m.col(0) = p.x / std::sqrt(std::abs(form.b(p.x, p.x)));
  m.col(1) = a;
  m.col(2) = b;
  m.col(3) = p.y / std::sqrt(std::abs(form.b(p.y, p.y)));
  return m.determinant();
}

Eigen::Matrix<double, 8, 4> StructureFrame::w_basis() const {
  Eigen::Matrix<double, 8, 4> w = Eigen::Matrix<double, 8, 4>::Zero();
  w.block<4, 2>(0, 0) = contact_basis;
  w.block<4, 2>(4, 2) = contact_basis;
  return w;
}

StructureFrame frame_at(const AmbientForm4& form, const BasePoint& p) {
  StructureFrame f;
  f.form = form;
  f.p = p;
  const Eigen::Matrix4d B = form.matrix();
  Eigen::Matrix<double, 2, 4> constraints;
  constraints.row(0) = (B * p.x).transpose() / p.x.norm();
  constraints.row(1) = (B * p.y).transpose() / p.y.norm();
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(constraints, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 4, 2> Q = svd.matrixV().rightCols<2>();
  const Eigen::Matrix2d Bq = Q.transpose() * B * Q;
  if (std::abs(Bq.determinant()) < 1e-10) fail_math("degenerate_contact_plane", "b restricted to <x,y>^perp is degenerate");
  f.eps = Bq.determinant() > 0 ? 1 : -1;
  f.contact_basis = Q;

  const double v = f.vol(Q.col(0), Q.col(1));
  Eigen::Matrix2d V;
  V << 0, v, -v, 0;
  const Eigen::Matrix2d BqInv = Bq.inverse();
  // Vol = -b(·, A·) on the contact plane.
  const Eigen::Matrix2d AQ = -BqInv * V;
  f.A = Q * AQ * BqInv * Q.transpose() * B;

  const Eigen::Matrix4d Id = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d Z = Eigen::Matrix4d::Zero();
  const double eta = form.eta;
  f.I << Z, Id, -eta * Id, Z;
  f.J << Z, eta * f.A, f.A, Z;
  f.K << f.A, Z, Z, -f.A;
  f.alpha << Id, Z, Z, -Id;
  f.G << B, Z, Z, eta * B;
  return f;
}

double RelationResiduals::max() const { return *std::max_element(values.begin(), values.end()); }

RelationResiduals frame_relations(const StructureFrame& f) {
  const Eigen::Matrix<double, 8, 4> W = f.w_basis();
  const double eta = f.form.eta, eps = f.eps;
  const Mat8 Id = Mat8::Identity();
  const Mat8 lhs[9] = {f.I * f.J - f.K,
                       f.J * f.K - eta * eps * f.I,
                       f.K * f.I - eta * f.J,
                       f.I * f.I + eta * Id,
                       f.J * f.J + eta * eps * Id,
                       f.K * f.K + eps * Id,
                       f.I * f.J + f.J * f.I,
                       f.I * f.K + f.K * f.I,
                       f.J * f.K + f.K * f.J};
  RelationResiduals r;
  const double scale = W.norm();
  for (int i = 0; i < 9; ++i) r.values[i] = (lhs[i] * W).norm() / scale;
  return r;
}

const char* to_string(BundleTensor t) {
  switch (t) {
    case BundleTensor::OmegaI: return "omega_i";
    case BundleTensor::G: return "g";
    case BundleTensor::GHat: return "ghat";
    case BundleTensor::OmegaK: return "omega_k";
    case BundleTensor::I: return "I";
    case BundleTensor::J: return "J";
    case BundleTensor::K: return "K";
    case BundleTensor::Alpha: return "alpha";
  }
  return "?";
}

namespace {

bool is_endomorphism(BundleTensor t) {
  return t == BundleTensor::I || t == BundleTensor::J || t == BundleTensor::K || t == BundleTensor::Alpha;
}

const Mat8& endomorphism(const StructureFrame& f, BundleTensor t) {
  switch (t) {
    case BundleTensor::I: return f.I;
    case BundleTensor::J: return f.J;
    case BundleTensor::K: return f.K;
    default: return f.alpha;
  }
}

double pairing(const StructureFrame& f, BundleTensor t, const Vec8& s, const Vec8& u) {
  switch (t) {
    case BundleTensor::OmegaI: return f.omega_i(s, u);
    case BundleTensor::G: return f.g(s, u);
    case BundleTensor::GHat: return f.ghat(s, u);
    default: return f.omega_k(s, u);
  }
}

}  // namespace

ConstancyResult covariant_constancy_residual(const AmbientForm4& form, const PathInM& path, const AmbientSection& sigma,
                                             const AmbientSection& tau, BundleTensor tensor, double t, double h) {
  if (!(h > 0) || !std::isfinite(h)) fail_input("step", "finite-difference step must be positive");
  auto point = [&](double s) {
    const auto [x, y] = path(s);
    return BasePoint::make(form, x, y);
  };
  auto frame = [&](double s) { return frame_at(form, point(s)); };
  auto proj = [&](const AmbientSection& sec, double s) { return w_project(form, point(s), sec(s)).stacked(); };

  auto check_step = [&](double coarse, double fine) {
    if (std::abs(coarse - fine) > 1e-3 * (1.0 + std::abs(fine)))
      fail_input("step_too_large", "finite-difference estimates disagree; reduce the step");
  };

  ConstancyResult out;
  const BasePoint p = point(t);
  const StructureFrame f = frame_at(form, p);

  const Vec4 xdot = detail::richardson_derivative<Vec4>([&](double s) { return path(s).first; }, t, h);
  const Vec4 ydot = detail::richardson_derivative<Vec4>([&](double s) { return path(s).second; }, t, h);
  Vec8 vel;
  vel << xdot, ydot;
  out.velocity_residual = w_residual(form, p, vel) / std::max(1e-300, vel.norm());
  out.velocity_in_w = out.velocity_residual < 1e-6;

  auto nabla = [&](const AmbientSection& sec) {
    const Vec8 d = detail::richardson_derivative<Vec8>([&](double s) { return proj(sec, s); }, t, h);
    return w_project(form, p, d).stacked();
  };

  const Vec8 s0 = proj(sigma, t);
  const Vec8 ds = nabla(sigma);
  if (is_endomorphism(tensor)) {
    auto e_sigma = [&](double s) -> Vec8 { return endomorphism(frame(s), tensor) * proj(sigma, s); };
    const Vec8 coarse = detail::central_derivative<Vec8>(e_sigma, t, h);
    const Vec8 fine = detail::central_derivative<Vec8>(e_sigma, t, h / 2);
    check_step(coarse.norm(), fine.norm());
    const Vec8 d = (4.0 * fine - coarse) / 3.0;
    const Vec8 r = w_project(form, p, d).stacked() - endomorphism(f, tensor) * ds;
    out.residual = r.norm();
    return out;
  }
  const Vec8 t0 = proj(tau, t);
  const Vec8 dt = nabla(tau);
  auto scalar = [&](double s) { return pairing(frame(s), tensor, proj(sigma, s), proj(tau, s)); };
  const double coarse = detail::central_derivative<double>(scalar, t, h);
  const double fine = detail::central_derivative<double>(scalar, t, h / 2);
  check_step(coarse, fine);
  const double dT = (4.0 * fine - coarse) / 3.0;
  out.residual = std::abs(dT - pairing(f, tensor, ds, t0) - pairing(f, tensor, s0, dt));
  return out;
}

CurvaturePairing curvature_pairing(const AmbientForm4& form, const BasePoint& p, const ContactVector& X) {
  const Vec4 xi = X.xi, mu = X.mu;
  // Component of the shorter vector off the longer one's line; the Gram-determinant form loses half the digits.
  const bool xi_long = xi.norm() >= mu.norm();
  const Vec4& big = xi_long ? xi : mu;
  const Vec4& small = xi_long ? mu : xi;
  const double bb = big.squaredNorm();
  const double off = bb > 0 ? (small - (small.dot(big) / bb) * big).norm() : 0.0;
  if (off > 1e-9 * std::max(1e-300, small.norm()))
    fail_math("not_colinear", "the two components of X must be colinear");
  const StructureFrame f = frame_at(form, p);
  const Vec8 x8 = X.stacked();
  if (w_residual(form, p, x8) > 1e-9 * std::max(1.0, x8.norm())) fail_input("not_in_W", "X must lie in W");

  const double bxx = form.b(p.x, p.x), byy = form.b(p.y, p.y);
  const double lx = std::sqrt(std::abs(bxx)), ly = std::sqrt(std::abs(byy));
  const Vec4 zero = Vec4::Zero();
  auto stack = [](const Vec4& a, const Vec4& b) {
    Vec8 v;
    v << a, b;
    return v;
  };
  // Unit normals of W and the derivative of each along a direction U = (ξ, μ).
  const Vec8 normals[4] = {stack(p.x / lx, zero), stack(p.y / ly, zero), stack(zero, p.x / lx), stack(zero, p.y / ly)};
  auto dnormal = [&](int a, const Vec8& U) {
    const Vec4 u1 = U.head<4>(), u2 = U.tail<4>();
    switch (a) {
      case 0: return stack(u1 / lx, zero);
      case 1: return stack(u2 / ly, zero);
      case 2: return stack(zero, u1 / lx);
      default: return stack(zero, u2 / ly);
    }
  };
  auto shape = [&](int a, const Vec8& U, const Vec8& V) { return -f.g(V, dnormal(a, U)); };

  const Vec8 JX = f.J * x8, KX = f.K * x8;
  double lhs = 0;
  for (int a = 0; a < 4; ++a) {
    const double ea = f.g(normals[a], normals[a]);
    lhs += ea * (shape(a, JX, x8) * shape(a, x8, KX) - shape(a, x8, x8) * shape(a, JX, KX));
  }
  const double norm_xy = bxx + form.eta * byy;
  const double rhs = -f.eps * norm_xy / (2.0 * bxx * byy) * f.ghat(x8, f.I * x8) * f.ghat(x8, x8);
  return {lhs, rhs};
}

bool stabilizer_membership(const Eigen::Matrix4d& M44, const Eigen::Matrix2d& b2, double tol) {
  const double scale = 1.0 + M44.norm();
  if (M44.block<2, 2>(0, 2).norm() > tol * scale || M44.block<2, 2>(2, 0).norm() > tol * scale) return false;
  const Eigen::Matrix2d N = M44.block<2, 2>(0, 0);
  if ((M44.block<2, 2>(2, 2) - N).norm() > tol * scale) return false;
  return (N.transpose() * b2 * N - b2).norm() <= tol * (1.0 + b2.norm()) * scale;
}

CliffordIsomorphism clifford_isomorphism(const Eigen::Matrix2d& b2, const Eigen::Vector2d& v, int eta) {
  if (eta != 1 && eta != -1) fail_input("eta", "eta must be +1 or -1");
  if ((b2 - b2.transpose()).norm() > 1e-12 * (1.0 + b2.norm())) fail_input("form", "b2 must be symmetric");
  if (std::abs(b2.determinant()) < 1e-12 * (1.0 + b2.squaredNorm())) fail_math("degenerate_form", "b2 is degenerate");
  const double bvv = v.dot(b2 * v);
  if (!(bvv > 1e-12 * v.squaredNorm())) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(b2);
    if (es.eigenvalues()[1] <= 0) fail_math("no_positive_direction", "b2 has no positive direction");
    fail_input("not_positive", "v is not a positive direction of b2");
  }
  const Eigen::Vector2d e1 = v / std::sqrt(bvv);
  const Eigen::Vector2d be1 = b2 * e1;
  const Eigen::Vector2d w(-be1[1], be1[0]);
  const double bww = w.dot(b2 * w);
  const int sigma = bww > 0 ? 1 : -1;
  const Eigen::Vector2d e2 = w / std::sqrt(std::abs(bww));

  CliffordIsomorphism out;
  out.sig = Signature2::make(eta, eta * sigma);
  const CliffordElement one = CliffordElement::scalar(1.0, out.sig);
  const CliffordElement kk = CliffordElement::unit_k(out.sig);
  const CliffordElement i_inv = CliffordElement::unit_i(out.sig) * (1.0 / out.sig.i_sq());
  auto phi0 = [&](const Eigen::Vector2d& u) { return one * u.dot(b2 * e1) + kk * (u.dot(b2 * e2) / sigma); };
  for (int col = 0; col < 4; ++col) {
    Vec4 unit = Vec4::Zero();
    unit[col] = 1.0;
    const CliffordElement img = phi0(unit.head<2>()) + i_inv * phi0(unit.tail<2>());
    out.phi.col(col) = img.vec();
  }
  return out;
}

}  // namespace bileg
