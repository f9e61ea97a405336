#include "bileg/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "bileg/error.hpp"
#include "lie.hpp"
#include "numerics.hpp"

namespace bileg {

using Eigen::Vector3d;

const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

namespace {

void require_unit_imaginary(const Quat& q, const char* what) {
  if (std::abs(q.w) > 1e-9 || std::abs(q.norm() - 1.0) > 1e-9)
    fail_input("axis", std::string(what) + " must be a unit imaginary quaternion");
}

void require_unit(const Quat& q, const char* what) {
  if (std::abs(q.norm() - 1.0) > 1e-9) fail_input("not_unit", std::string(what) + " must be a unit quaternion");
}

Vector3d perpendicular_unit(const Vector3d& a) {
  Vector3d best = Vector3d::UnitX();
  double score = 2.0;
  for (int i = 0; i < 3; ++i) {
    const Vector3d e = Vector3d::Unit(i);
    if (std::abs(a.dot(e)) < score - 1e-12) {
      score = std::abs(a.dot(e));
      best = e;
    }
  }
  return (best - a.dot(best) * a).normalized();
}

Vector3d cross(const Vector3d& a, const Vector3d& b) { return a.cross(b); }

}  // namespace

Quat rotate_A(const Quat& x, const Quat& y, const Quat& z) {
  const double sx = x.norm(), sy = y.norm();
  if (std::abs(dot(x, y)) > 1e-9 * sx * sy) fail_input("not_orthogonal", "x and y must be orthogonal");
  const double sz = std::max(1.0, z.norm());
  if (std::abs(dot(z, x)) > 1e-9 * sz * sx || std::abs(dot(z, y)) > 1e-9 * sz * sy)
    fail_input("not_in_contact_plane", "z must be orthogonal to x and y");
  return y * x.conj() * z;
}

Quat hopf(const Quat& xi, Side side, const Quat& g) {
  require_unit_imaginary(xi, "Hopf axis");
  const Quat r = side == Side::Left ? g * xi * g.inverse() : g.inverse() * xi * g;
  return r.imag();
}

Quat hopf_section(const Quat& xi, Side side, const Quat& c0) {
  require_unit_imaginary(xi, "Hopf axis");
  require_unit_imaginary(c0, "base point");
  const Vector3d a = xi.imag_vec(), c = c0.imag_vec();
  Vector3d n = cross(a, c);
  const double s = n.norm(), co = a.dot(c);
  Quat g = Quat::one();
  if (s < 1e-14) {
    if (co < 0) g = Quat::pure(perpendicular_unit(a));
  } else {
    g = exp_axis(Quat::pure(n / s), 0.5 * std::atan2(s, co));
  }
  return side == Side::Left ? g : g.conj();
}

double contact_form(const Quat& xi, Side side, const Quat& g, const Quat& v) {
  return side == Side::Left ? dot(v, g * xi) : dot(v, xi * g);
}

SphereCurve::SphereCurve(Fn fn, double t0, double t1, bool closed, bool arc_length, int nsamples)
    : fn_(std::move(fn)), t0_(t0), t1_(t1), closed_(closed), arc_length_(arc_length) {
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) fail_input("curve_domain", "parameter interval is empty");
  if (nsamples < 2) fail_input("curve_samples", "need at least two samples");
  param_.reserve(nsamples + 1);
  samples_.reserve(nsamples + 1);
  for (int n = 0; n <= nsamples; ++n) {
    const double t = t0 + (t1 - t0) * n / nsamples;
    const Eval e = fn_(t);
    if (!e.c.allFinite() || std::abs(e.c.norm() - 1.0) > 1e-9) fail_input("curve_sample", "curve leaves the unit sphere");
    param_.push_back(t);
    samples_.push_back(Quat::pure(e.c));
  }
  if (closed_ && (samples_.front() - samples_.back()).norm() > 1e-9)
    fail_input("not_closed", "closed curve endpoints differ");
}

SphereCurve::Eval SphereCurve::eval(double t) const {
  if (closed_) {
    const double p = t1_ - t0_;
    double r = std::fmod(t - t0_, p);
    if (r < 0) r += p;
    return fn_(t0_ + r);
  }
  return fn_(std::clamp(t, t0_, t1_));
}

SphereCurve SphereCurve::repeated(int k) const {
  if (!closed_) fail_input("not_closed", "only closed curves can be repeated");
  if (k < 1) fail_input("repeat_count", "repeat count must be positive");
  SphereCurve base = *this;
  return SphereCurve([base](double t) { return base.eval(t); }, t0_, t0_ + k * (t1_ - t0_), true, arc_length_,
                     static_cast<int>(samples_.size() - 1) * k);
}

SphereCurve SphereCurve::latitude(const Vector3d& axis, double colatitude, const Vector3d* start_dir) {
  if (axis.norm() < 1e-12) fail_input("axis", "latitude axis must be nonzero");
  if (!(colatitude >= 0.0 && colatitude <= M_PI)) fail_input("colatitude", "colatitude must lie in [0, π]");
  const Vector3d a = axis.normalized();
  Vector3d u;
  if (start_dir) {
    u = *start_dir - a.dot(*start_dir) * a;
    if (u.norm() < 1e-12) fail_input("start_direction", "start direction is parallel to the axis");
    u.normalize();
  } else {
    u = perpendicular_unit(a);
  }
  const Vector3d v = u.cross(a);
  const double cp = std::cos(colatitude), sp = std::sin(colatitude);
  return SphereCurve(
      [=](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return Eval{cp * a + sp * (c * u + s * v), sp * (-s * u + c * v)};
      },
      0.0, 2.0 * M_PI, true);
}

SphereCurve SphereCurve::great_circle(const Vector3d& axis, const Vector3d* start_dir) {
  return latitude(axis, M_PI / 2, start_dir);
}

SphereCurve SphereCurve::fourier(const std::vector<Vector3d>& cos_coeffs, const std::vector<Vector3d>& sin_coeffs) {
  if (cos_coeffs.empty()) fail_input("fourier", "need at least the constant coefficient");
  auto fn = [cos_coeffs, sin_coeffs](double t) {
    Vector3d p = cos_coeffs[0], dp = Vector3d::Zero();
    for (std::size_t n = 1; n < cos_coeffs.size(); ++n) {
      p += cos_coeffs[n] * std::cos(n * t);
      dp -= cos_coeffs[n] * (n * std::sin(n * t));
    }
    for (std::size_t n = 0; n < sin_coeffs.size(); ++n) {
      const double m = static_cast<double>(n + 1);
      p += sin_coeffs[n] * std::sin(m * t);
      dp += sin_coeffs[n] * (m * std::cos(m * t));
    }
    const double r = p.norm();
    if (r < 1e-9) fail_math("fourier_zero", "trigonometric polynomial vanishes; curve undefined");
    const Vector3d c = p / r;
    return Eval{c, (dp - c.dot(dp) * c) / r};
  };
  return SphereCurve(fn, 0.0, 2.0 * M_PI, true);
}

SphereCurve SphereCurve::from_points(std::vector<Vector3d> pts, bool closed) {
  if (pts.empty()) fail_input("points", "point list is empty");
  for (auto& p : pts) {
    if (!p.allFinite() || p.norm() < 1e-12) fail_input("points", "points must be finite and nonzero");
    p.normalize();
  }
  if (closed && pts.size() > 1 && (pts.front() - pts.back()).norm() < 1e-12) pts.pop_back();
  const int n = static_cast<int>(pts.size());
  if (n == 1) {
    const Vector3d p = pts[0];
    return SphereCurve([p](double) { return Eval{p, Vector3d::Zero()}; }, 0.0, 1.0, true);
  }
  if (closed && n < 3) fail_input("points", "a closed spline needs at least three distinct points");
  // Second derivatives of the interpolating cubic spline, by Jacobi iteration (the system is diagonally dominant).
  std::vector<Vector3d> M(n, Vector3d::Zero()), rhs(n, Vector3d::Zero());
  auto idx = [&](int k) { return closed ? (k % n + n) % n : std::clamp(k, 0, n - 1); };
  for (int k = 0; k < n; ++k) {
    if (!closed && (k == 0 || k == n - 1)) continue;
    rhs[k] = 6.0 * (pts[idx(k + 1)] - 2.0 * pts[k] + pts[idx(k - 1)]);
  }
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Vector3d> next(n, Vector3d::Zero());
    double delta = 0;
    for (int k = 0; k < n; ++k) {
      if (!closed && (k == 0 || k == n - 1)) continue;
      next[k] = (rhs[k] - M[idx(k - 1)] - M[idx(k + 1)]) / 4.0;
      delta = std::max(delta, (next[k] - M[k]).norm());
    }
    M.swap(next);
    if (delta < 1e-16) break;
  }
  const double t1 = closed ? n : n - 1;
  auto fn = [pts, M, closed, n, idx](double t) {
    int k = std::clamp(static_cast<int>(std::floor(t)), 0, closed ? n - 1 : n - 2);
    const double s = t - k;
    const Vector3d& p0 = pts[k];
    const Vector3d& p1 = pts[idx(k + 1)];
    const Vector3d& m0 = M[k];
    const Vector3d& m1 = M[idx(k + 1)];
    const double u = 1.0 - s;
    const Vector3d p = u * p0 + s * p1 + ((u * u * u - u) * m0 + (s * s * s - s) * m1) / 6.0;
    const Vector3d dp = p1 - p0 + ((1.0 - 3.0 * u * u) * m0 + (3.0 * s * s - 1.0) * m1) / 6.0;
    const double r = p.norm();
    const Vector3d c = p / r;
    return Eval{c, (dp - c.dot(dp) * c) / r};
  };
  return SphereCurve(fn, 0.0, t1, closed, false, std::max(64, 8 * n));
}

namespace {

constexpr double kGLx[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
constexpr double kGLw[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                            0.2369268850561891};

struct ArcLengthTable {
  SphereCurve curve;
  double t0, dt;
  std::vector<double> cum;

  double speed(double t) const { return 0.5 * curve.eval(t).dc.norm(); }
  double integral(double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int k = 0; k < 5; ++k) s += kGLw[k] * speed(mid + half * kGLx[k]);
    return s * half;
  }
  double length() const { return cum.back(); }
  double invert(double s) const {
    s = std::clamp(s, 0.0, length());
    const int cells = static_cast<int>(cum.size()) - 1;
    int k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
    k = std::clamp(k, 0, cells - 1);
    const double a = t0 + k * dt;
    const double span = cum[k + 1] - cum[k];
    double t = a + (span > 0 ? (s - cum[k]) / span : 0.0) * dt;
    for (int iter = 0; iter < 12; ++iter) {
      const double f = cum[k] + integral(a, t) - s;
      const double step = f / speed(t);
      t = std::clamp(t - step, a, a + dt);
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
    }
    return t;
  }
};

}  // namespace

SphereCurve reparametrize(const SphereCurve& curve) {
  if (curve.arc_length()) return curve;
  auto table = std::make_shared<ArcLengthTable>(ArcLengthTable{curve, curve.t0(), 0.0, {}});
  const int cells = std::max<int>(1024, 2 * static_cast<int>(curve.samples().size()));
  table->dt = curve.period() / cells;
  double vmax = 0, vmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cells; ++k)
    for (int j = 0; j < 5; ++j) {
      const double v = table->speed(table->t0 + (k + 0.5 + 0.5 * kGLx[j]) * table->dt);
      vmax = std::max(vmax, v);
      vmin = std::min(vmin, v);
    }
  if (!(vmax > 0) || vmin < 1e-9 * vmax) fail_math("degenerate_curve", "curve has a stationary segment");
  table->cum.assign(cells + 1, 0.0);
  for (int k = 0; k < cells; ++k)
    table->cum[k + 1] = table->cum[k] + table->integral(table->t0 + k * table->dt, table->t0 + (k + 1) * table->dt);
  const double L = table->length();
  auto fn = [table](double s) {
    const double t = table->invert(s);
    const SphereCurve::Eval e = table->curve.eval(t);
    return SphereCurve::Eval{e.c, e.dc / (0.5 * e.dc.norm())};
  };
  return SphereCurve(fn, 0.0, L, curve.closed(), true, static_cast<int>(curve.samples().size() - 1));
}

Quat HorizontalCurve::at(double t) const {
  if (q.size() < 2) return q.at(0);
  const double u = (t - t0) / step;
  const int n = std::clamp(static_cast<int>(std::floor(u)), 0, static_cast<int>(q.size()) - 2);
  const double s = u - n;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return (q[n] * h00 + dq[n] * (h10 * step) + q[n + 1] * h01 + dq[n + 1] * (h11 * step)).normalized();
}

Quat HorizontalCurve::derivative_at(double t) const {
  if (q.size() < 2) return dq.at(0);
  const double u = (t - t0) / step;
  const int n = std::clamp(static_cast<int>(std::floor(u)), 0, static_cast<int>(q.size()) - 2);
  const double s = u - n;
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
  return q[n] * (d00 / step) + dq[n] * d10 + q[n + 1] * (d01 / step) + dq[n + 1] * d11;
}

double HorizontalCurve::horizontality_residual() const {
  double r = 0;
  for (std::size_t n = 0; n < q.size(); ++n) r = std::max(r, std::abs(contact_form(axis, side, q[n], dq[n])));
  return r;
}

double HorizontalCurve::speed_residual() const {
  double r = 0;
  for (const auto& d : dq) r = std::max(r, std::abs(d.norm() - 1.0));
  return r;
}

Quat horizontal_generator(const SphereCurve& c, const Quat& xi, Side side, double s, const Quat& g) {
  const Quat cdot = Quat::pure(c.eval(s).dc);
  if (side == Side::Left) return (g.inverse() * cdot * g * xi * -0.5).imag();
  return (xi * g * cdot * g.inverse() * -0.5).imag();
}

HorizontalCurve horizontal_lift(const SphereCurve& curve, const Quat& xi, Side side, const Quat& g0, double h,
                                double length) {
  require_unit_imaginary(xi, "Hopf axis");
  require_unit(g0, "start");
  if (!(h > 0) || !std::isfinite(h)) fail_input("step", "step must be positive");
  for (std::size_t n = 0; n < curve.samples().size(); ++n) {
    const double speed = curve.eval(curve.param()[n]).dc.norm();
    if (std::abs(speed - 2.0) > 1e-6) {
      if (speed < 1e-9) fail_math("degenerate_curve", "curve is stationary");
      fail_math("non_unit_speed", "curve must have unit (b/4)-speed; reparametrize first");
    }
  }
  const Quat c0 = Quat::pure(curve.eval(curve.t0()).c);
  if ((hopf(xi, side, g0) - c0).norm() > 1e-9) fail_math("start_mismatch", "start does not lie over the curve start");
  if (std::isnan(length)) length = curve.period();
  if (!(length > 0)) fail_input("length", "lift length must be positive");
  if (length > curve.period() * (1 + 1e-12) && !curve.closed())
    fail_input("length", "an open curve cannot be lifted past its end");

  const int steps = std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
  HorizontalCurve out;
  out.side = side;
  out.axis = xi;
  out.step = length / steps;
  out.t0 = curve.t0();
  out.q.reserve(steps + 1);
  out.dq.reserve(steps + 1);

  const double dt = out.step;
  const bool left = side == Side::Left;
  auto gen = [&](double s, const Quat& g) { return horizontal_generator(curve, xi, side, s, g); };
  Quat g = g0;
  for (int n = 0; n <= steps; ++n) {
    const double s = curve.t0() + n * dt;
    const Quat u = gen(s, g);
    out.q.push_back(g);
    out.dq.push_back(left ? g * u : u * g);
    if (n == steps) break;
    g = detail::rkmk4_step(g, left, s, dt, gen);
  }
  return out;
}

double signed_area_polygon(const std::vector<Vector3d>& v) {
  if (v.size() < 3) return 0.0;
  double total = 0;
  const Vector3d& a = v[0];
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Vector3d& b = v[i];
    const Vector3d& c = v[i + 1];
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    total -= 2.0 * std::atan2(num, den);
  }
  return detail::wrap_4pi(total);
}

double signed_area(const SphereCurve& curve, int n) {
  if (!curve.closed()) fail_input("not_closed", "signed area needs a closed curve");
  if (n < 8) fail_input("resolution", "need at least 8 vertices");
  auto poly = [&](int m) {
    std::vector<Vector3d> v(m);
    for (int k = 0; k < m; ++k) v[k] = curve.eval(curve.t0() + curve.period() * k / m).c;
    return signed_area_polygon(v);
  };
  const double coarse = poly(n), fine = poly(2 * n);
  const double a = detail::wrap_4pi(fine + detail::wrap_4pi(fine - coarse) / 3.0);
  // ±2π name the same class; report the representative in (−2π, 2π].
  return a <= -2.0 * M_PI + 1e-9 ? a + 4.0 * M_PI : a;
}

Holonomy holonomy(const HorizontalCurve& lift, double p) {
  if (!(p > 0) || lift.t0 + p > lift.t_end() + 1e-9 * (1.0 + p)) fail_input("period", "period outside the lifted range");
  const Quat g0 = lift.q.front();
  const Quat gp = lift.at(lift.t0 + p);
  Holonomy out;
  out.period = p;
  out.element = lift.side == Side::Left ? g0.inverse() * gp : gp * g0.inverse();
  const Vector3d xi = lift.axis.imag_vec(), v = out.element.imag_vec();
  out.off_circle = (v - v.dot(xi) * xi).norm();
  if (out.off_circle > 1e-6) fail_math("off_circle", "holonomy element is not in the fiber circle");
  const double angle = std::atan2(v.dot(xi), out.element.w);
  const double sgn = lift.side == Side::Left ? 1.0 : -1.0;
  out.q = detail::wrap_unit(sgn * angle / (2.0 * M_PI));
  for (std::size_t n = 0; n < lift.q.size(); ++n) {
    const double t = lift.param(n);
    if (t + p > lift.t_end() + 1e-12) break;
    const Quat expect = lift.side == Side::Left ? lift.q[n] * out.element : out.element * lift.q[n];
    out.quasiperiod_residual = std::max(out.quasiperiod_residual, distance(lift.at(t + p), expect));
  }
  return out;
}

HolonomyAreaCheck holonomy_area_check(const SphereCurve& curve, const Quat& xi, Side side, double h, double tol) {
  if (!curve.closed()) fail_input("not_closed", "holonomy-area check needs a closed curve");
  const SphereCurve rc = reparametrize(curve);
  const Quat g0 = hopf_section(xi, side, Quat::pure(rc.eval(rc.t0()).c));
  const HorizontalCurve lift = horizontal_lift(rc, xi, side, g0, h);
  const Holonomy hol = holonomy(lift, rc.period());
  HolonomyAreaCheck out;
  out.area = signed_area(rc);
  out.q_holonomy = hol.q;
  out.q_area = detail::wrap_unit(-out.area / (4.0 * M_PI));
  out.discrepancy = detail::dist_to_int(out.q_holonomy - out.q_area);
  out.agree = out.discrepancy < tol;
  return out;
}

GaussBonnet gauss_bonnet_check(const SphereCurve& curve, int n) {
  if (!curve.closed()) fail_input("not_closed", "Gauss-Bonnet check needs a closed curve");
  if (n < 16) fail_input("resolution", "need at least 16 samples");
  const SphereCurve rc = reparametrize(curve);
  const double L = rc.period();
  std::vector<Vector3d> c(n);
  for (int k = 0; k < n; ++k) c[k] = rc.eval(rc.t0() + L * k / n).c;
  auto total_curvature = [&](int stride) {
    const int m = n / stride;
    const double ds = L / m;
    auto get = [&](int k) -> Vector3d { return c[((k % m + m) % m) * stride]; };
    double total = 0;
    for (int k = 0; k < m; ++k) {
      const Vector3d d1 = (get(k - 2) - 8.0 * get(k - 1) + 8.0 * get(k + 1) - get(k + 2)) / (12.0 * ds);
      const Vector3d d2 = (-get(k - 2) + 16.0 * get(k - 1) - 30.0 * get(k) + 16.0 * get(k + 1) - get(k + 2)) / (12.0 * ds * ds);
      total -= get(k).dot(d1.cross(d2)) / d1.squaredNorm() * ds;
    }
    return total;
  };
  const double fine = total_curvature(1), coarse = total_curvature(2);
  if (std::abs(fine - coarse) > 1e-4 * (1.0 + std::abs(fine)))
    fail_math("under_resolved", "geodesic curvature estimate is unstable at this resolution");
  GaussBonnet out;
  out.area = signed_area(rc);
  out.total_geodesic_curvature = fine;
  out.residual = detail::wrap_4pi(out.area + fine - 2.0 * M_PI);
  return out;
}

}  // namespace bileg
