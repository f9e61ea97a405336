#include <algorithm>
#include <cmath>

#include "bileg/error.hpp"
#include "bileg/factory.hpp"
#include "factory_detail.hpp"
#include "numerics.hpp"

namespace bileg {

std::optional<std::pair<long, long>> snap_q(double q) {
  auto r = detail::snap_rational(q, 64, 1e-6);
  if (r && r->first == 0) r = std::pair<long, long>{1, 1};
  return r;
}

bool PeriodLattice::contains(long m, long n) const {
  const long den = q1_den * q2_den;
  const long num = m * q1_num * q2_den - n * q2_num * q1_den;
  return num % den == 0;
}

namespace {

double unit_q(double turns) {
  const double q = detail::wrap_unit(turns);
  return q < 1e-12 ? 1.0 : q;
}

/// Minimal quasiperiod of a sampled horizontal factor. `right` selects γ(x+p) = ζ·γ(x), else γ(x)·ζ.
Quasiperiod detect_quasiperiod(const FactorCurve& f, const Quat& axis, bool right, int origin, const char* which) {
  const int n = static_cast<int>(f.q.size());
  if (n - origin < 8) fail_math("not_quasiperiodic", std::string(which) + ": too few samples past the origin");
  const std::vector<Quat> dq = f.first_derivative();
  const Quat xi = axis.imag() * (1.0 / axis.norm());
  auto proj = [&](const Quat& g) { return right ? g.conj() * xi * g : g * xi * g.conj(); };
  auto at = [&](double t) { return detail::hermite(f.q, dq, f.t0, f.h, t).normalized(); };
  const Quat g0 = f.q[origin];
  const Quat c0 = proj(g0);
  const Quat dc0 = right ? dq[origin].conj() * xi * g0 + g0.conj() * xi * dq[origin]
                         : dq[origin] * xi * g0.conj() + g0 * xi * dq[origin].conj();
  if (dc0.norm() < 1e-9) fail_math("not_quasiperiodic", std::string(which) + " is vertical or constant");
  auto F = [&](double t) { return dot(proj(at(t)) - c0, dc0); };
  const double t0 = f.t(origin);
  double prev = F(f.t(origin + 1));
  for (int k = origin + 1; k + 1 < n; ++k) {
    const double next = F(f.t(k + 1));
    if (prev < 0 && next >= 0) {
      double lo = f.t(k), hi = f.t(k + 1), flo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi), fm = F(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double p = 0.5 * (lo + hi) - t0;
      const Quat gp = at(t0 + p);
      if ((proj(gp) - c0).norm() < 1e-6) {
        Quasiperiod qp;
        qp.p = p;
        qp.element = right ? gp * g0.conj() : g0.conj() * gp;
        const Eigen::Vector3d v = qp.element.imag_vec(), x = xi.imag_vec();
        if ((v - v.dot(x) * x).norm() < 1e-6) {
          const double angle = std::atan2(v.dot(x), qp.element.w);
          qp.q = unit_q((right ? -angle : angle) / (2.0 * M_PI));
          for (int m = origin; m < n && f.t(m) + p <= f.t(n - 1); ++m) {
            const Quat expect = right ? qp.element * f.q[m] : f.q[m] * qp.element;
            qp.residual = std::max(qp.residual, distance(at(f.t(m) + p), expect));
          }
          if (qp.residual < 1e-5) return qp;
        }
      }
    }
    prev = next;
  }
  fail_math("not_quasiperiodic", std::string(which) + " has no quasiperiod inside the sampled range");
}

}  // namespace

std::pair<Quasiperiod, Quasiperiod> factor_quasiperiods(const Factorization& f) {
  if (std::abs(dot(f.a, f.b)) > 1e-9) fail_math("not_orthogonal", "a and b must be orthogonal");
  const int i0 = static_cast<int>(std::lround(-f.g1.t0 / f.g1.h));
  const int j0 = static_cast<int>(std::lround(-f.g2.t0 / f.g2.h));
  if (i0 < 0 || j0 < 0 || i0 >= static_cast<int>(f.g1.q.size()) || j0 >= static_cast<int>(f.g2.q.size()))
    fail_input("factor_origin", "factor samples do not contain the origin");
  return {detect_quasiperiod(f.g1, f.axis1(), true, i0, "γ₁"), detect_quasiperiod(f.g2, f.axis2(), false, j0, "γ₂")};
}

PeriodLattice period_lattice(const Factorization& f) {
  const auto [f1, f2] = factor_quasiperiods(f);
  const auto s1 = snap_q(f1.q), s2 = snap_q(f2.q);
  if (!s1 || !s2) fail_math("no_maximal_lattice", "a holonomy angle is not rational within tolerance");
  PeriodLattice L;
  L.p1 = f1.p;
  L.p2 = f2.p;
  L.q1_num = s1->first;
  L.q1_den = s1->second;
  L.q2_num = s2->first;
  L.q2_den = s2->second;
  return L;
}

GaussMap gauss_map(const Factorization& f) {
  if (std::abs(dot(f.a, f.b)) > 1e-9) fail_math("not_orthogonal", "a and b must be orthogonal");
  GaussMap g;
  const Quat target = -(f.a.conj() * f.b).imag();
  g.n = hopf_section(Quat::i(), Side::Left, target * (1.0 / target.norm()));
  g.m = -(f.a * g.n * Quat::j());
  auto pi_i = [](const Quat& y) { return (y * Quat::i() * y.conj()).imag_vec(); };
  for (const auto& q : f.g2.q) g.first.push_back(pi_i(q * g.m));
  for (const auto& q : f.g1.q) g.second.push_back(pi_i(q.conj() * g.n));
  return g;
}

namespace {

double cubic_at(const std::vector<double>& v, double t0, double h, double t) {
  const int n = static_cast<int>(v.size());
  if (n < 4) fail_input("too_few_samples", "need at least four samples");
  const double u = (t - t0) / h;
  const int k = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  double r = 0;
  for (int a = 0; a < 4; ++a) {
    double w = 1;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (u - (k + b)) / static_cast<double>(a - b);
    r += v[k + a] * w;
  }
  return r;
}

}  // namespace

FlatTorusReport flat_torus_criteria(const Factorization& f, const AngleData& angle, const PeriodLattice& lattice) {
  if (angle.theta1.size() != f.g1.q.size() || angle.theta2.size() != f.g2.q.size())
    fail_input("angle_grid", "angle data and factors are sampled differently");
  auto integral = [&](const std::vector<double>& th, const FactorCurve& g, double p) {
    const double end = g.t(g.q.size() - 1);
    if (p > end + 1e-9) fail_input("period_outside_grid", "the grid does not cover a full period");
    return -2.0 * (cubic_at(th, g.t0, g.h, p) - cubic_at(th, g.t0, g.h, 0.0));
  };
  FlatTorusReport r;
  // ∮κ₁ = −2∮∂₁θ and ∮κ₂ = +2∮∂₂θ.
  r.curvature_integral1 = integral(angle.theta1, f.g1, lattice.p1);
  r.curvature_integral2 = -integral(angle.theta2, f.g2, lattice.p2);
  r.q1 = lattice.q1();
  r.q2 = lattice.q2();
  r.half_or_whole1 = lattice.q1_den <= 2;
  r.half_or_whole2 = lattice.q2_den <= 2;
  r.projection = projection_immersion_test(angle.theta);
  r.projectable = std::abs(r.curvature_integral1) < 1e-6 && std::abs(r.curvature_integral2) < 1e-6 && r.half_or_whole1 &&
                  r.half_or_whole2 && r.projection.immersed;
  return r;
}

namespace {

FactorCurve sample_lift(const HorizontalCurve& lift, const SphereCurve& curve, double t0, double h, int n) {
  FactorCurve f;
  f.t0 = t0;
  f.h = h;
  const bool left = lift.side == Side::Left;
  auto gen = [&](double t) { return horizontal_generator(curve, lift.axis, lift.side, t, lift.at(t)); };
  const double delta = 1e-4;
  for (int k = 0; k < n; ++k) {
    const double t = f.t(k);
    const Quat q = lift.at(t);
    const Quat u = horizontal_generator(curve, lift.axis, lift.side, t, q);
    const double lo = std::max(t - delta, lift.t0);
    const double hi = std::min(t + delta, lift.t_end());
    const Quat du = (gen(hi) - gen(lo)) * (1.0 / (hi - lo));
    f.q.push_back(q);
    f.dq.push_back(left ? q * u : u * q);
    f.ddq.push_back(left ? q * (u * u + du) : (u * u + du) * q);
  }
  return f;
}

Quat unit_axis(const Quat& q) { return q.imag() * (1.0 / q.imag().norm()); }

}  // namespace

AnsatzResult torus_ansatz(const SphereCurve& c1, const SphereCurve& c2, const Quat& a, const Quat& b, const GridSpec& spec,
                          double h, int cover) {
  if (std::abs(a.norm() - 1) > 1e-9 || std::abs(b.norm() - 1) > 1e-9) fail_math("not_unit", "a and b must be unit quaternions");
  if (std::abs(dot(a, b)) > 1e-9) fail_math("not_orthogonal", "a and b must be orthogonal");
  if (!c1.closed() || !c2.closed()) fail_input("not_closed", "ansatz curves must be closed");
  if (spec.origin_i() != 0 || spec.origin_j() != 0) fail_input("ansatz_grid", "the ansatz grid must start at the origin");
  if (cover < 1) fail_input("cover", "cover must be positive");
  const SphereCurve r1 = reparametrize(c1), r2 = reparametrize(c2);
  const Quat xi1 = unit_axis(a.conj() * b);
  const Quat xi2 = unit_axis(-(b * a.conj()));
  if ((Quat::pure(r1.eval(r1.t0()).c) - xi1).norm() > 1e-9) fail_math("start_mismatch", "c₁(0) must equal ā·b");
  if ((Quat::pure(r2.eval(r2.t0()).c) - xi2).norm() > 1e-9) fail_math("start_mismatch", "c₂(0) must equal −b·ā");

  AnsatzResult out;
  out.lift1 = horizontal_lift(r1, xi1, Side::Right, Quat::one(), h, spec.x1 + cover * r1.period());
  out.lift2 = horizontal_lift(r2, xi2, Side::Left, Quat::one(), h, spec.y1 + cover * r2.period());

  Factorization fac;
  fac.a = a;
  fac.b = b;
  fac.g1 = sample_lift(out.lift1, r1, spec.x0, spec.h1(), spec.n1);
  fac.g2 = sample_lift(out.lift2, r2, spec.y0, spec.h2(), spec.n2);
  out.grid = construct(fac, spec);

  const Holonomy h1 = holonomy(out.lift1, r1.period());
  const Holonomy h2 = holonomy(out.lift2, r2.period());
  out.factor1 = {r1.period(), unit_q(h1.q), h1.element, h1.quasiperiod_residual};
  // The second factor's holonomy is measured against ξ₂ = b·ā, the opposite of its lift axis.
  out.factor2 = {r2.period(), unit_q(-h2.q), h2.element, h2.quasiperiod_residual};
  const auto s1 = snap_q(out.factor1.q), s2 = snap_q(out.factor2.q);
  if (s1 && s2) {
    PeriodLattice L;
    L.p1 = out.factor1.p;
    L.p2 = out.factor2.p;
    L.q1_num = s1->first;
    L.q1_den = s1->second;
    L.q2_num = s2->first;
    L.q2_den = s2->second;
    out.lattice = L;
  }
  return out;
}

double lattice_displacement(const AnsatzResult& r, int m, int n, double x1, double x2) {
  const double s1 = x1 + m * r.factor1.p, s2 = x2 + n * r.factor2.p;
  for (double v : {x1, x2, s1, s2})
    if (v < 0) fail_input("lattice_range", "lattice points must lie in the integrated range");
  if (s1 > r.lift1.t_end() + 1e-12 || x1 > r.lift1.t_end() + 1e-12 || s2 > r.lift2.t_end() + 1e-12 ||
      x2 > r.lift2.t_end() + 1e-12)
    fail_input("lattice_range", "lattice points must lie in the integrated range");
  const Factorization& f = *r.grid.factors;
  auto phi = [&](double u, double v) {
    const Quat g1 = r.lift1.at(u), g2 = r.lift2.at(v);
    return std::pair<Quat, Quat>{g2 * f.a * g1, g2 * f.b * g1};
  };
  const auto p = phi(x1, x2), q = phi(s1, s2);
  return std::hypot(distance(p.first, q.first), distance(p.second, q.second));
}

}  // namespace bileg
