#include "bileg/bileg.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "bileg/error.hpp"
#include "bileg/factory.hpp"
#include "bileg/io.hpp"
#include "bileg/sphere.hpp"
#include "numerics.hpp"

struct bileg_curve {
  bileg::SphereCurve curve;
};

struct bileg_lift {
  bileg::HorizontalCurve lift;
  double period = 0;
  bool closed = false;
};

struct bileg_surface {
  bileg::ImmersionGrid grid;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_code;

int set_error(int status, const std::string& code, const std::string& message) {
  g_code = code;
  g_error = message;
  return status;
}

template <class F>
int guard(F&& f) {
  try {
    g_error.clear();
    g_code.clear();
    return f();
  } catch (const bileg::Error& e) {
    std::string msg = e.what();
    if (msg.rfind(e.code() + ": ", 0) == 0) msg = msg.substr(e.code().size() + 2);
    return set_error(e.kind() == bileg::ErrorKind::Input ? BILEG_ERR_INPUT : BILEG_ERR_MATH, e.code(), msg);
  } catch (const std::bad_alloc&) {
    return set_error(BILEG_ERR_INTERNAL, "out_of_memory", "allocation failed");
  } catch (const std::exception& e) {
    return set_error(BILEG_ERR_INTERNAL, "internal", e.what());
  }
}

int null_arg(const char* name) { return set_error(BILEG_ERR_INPUT, "null_argument", std::string(name) + " is NULL"); }

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

bileg::Quat quat(const double v[4]) { return {v[0], v[1], v[2], v[3]}; }

void put(const bileg::Quat& q, double out[4]) {
  out[0] = q.w;
  out[1] = q.x;
  out[2] = q.y;
  out[3] = q.z;
}

int make_curve(const std::string& text, bileg_curve** out) {
  const bileg::io::CurveSpec spec = bileg::io::curve_spec_from_json(text);
  *out = new bileg_curve{spec.to_curve()};
  return BILEG_OK;
}

}  // namespace

extern "C" {

const char* bileg_version(void) { return "1.0.0"; }
const char* bileg_last_error(void) { return g_error.c_str(); }
const char* bileg_last_error_code(void) { return g_code.c_str(); }
void bileg_string_free(char* s) { std::free(s); }

int bileg_parse_quat(const char* text, double out[4]) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guard([&] {
    put(bileg::io::parse_quat(text), out);
    return BILEG_OK;
  });
}

int bileg_curve_load(const char* path, bileg_curve** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] { return make_curve(bileg::io::read_file(path), out); });
}

int bileg_curve_from_json(const char* json, bileg_curve** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  return guard([&] { return make_curve(json, out); });
}

void bileg_curve_free(bileg_curve* c) { delete c; }

int bileg_curve_start(const bileg_curve* c, double out[3]) {
  if (!c) return null_arg("curve");
  if (!out) return null_arg("out");
  const Eigen::Vector3d p = c->curve.eval(c->curve.t0()).c;
  for (int k = 0; k < 3; ++k) out[k] = p[k];
  return BILEG_OK;
}

int bileg_curve_period(const bileg_curve* c, double* out) {
  if (!c) return null_arg("curve");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = bileg::reparametrize(c->curve).period();
    return BILEG_OK;
  });
}

int bileg_curve_area(const bileg_curve* c, bileg_area_report* out) {
  if (!c) return null_arg("curve");
  if (!out) return null_arg("out");
  return guard([&] {
    const double area = bileg::signed_area(c->curve);
    out->area = area;
    out->q = bileg::detail::wrap_unit(-area / (4.0 * M_PI));
    if (out->q > 1.0 - 1e-9) out->q = 0.0;
    const auto snap = bileg::detail::snap_rational(out->q, 64, 1e-6);
    out->snapped = snap ? 1 : 0;
    out->num = snap ? snap->first : 0;
    out->den = snap ? snap->second : 0;
    return BILEG_OK;
  });
}

int bileg_lift_compute(const bileg_curve* c, const double xi[4], int side, const double* start, double step,
                       bileg_lift** out) {
  if (!c) return null_arg("curve");
  if (!xi) return null_arg("xi");
  if (!out) return null_arg("out");
  return guard([&] {
    if (side != BILEG_LEFT && side != BILEG_RIGHT) bileg::fail_input("side", "side must be left or right");
    if (!(step > 0) || !std::isfinite(step)) bileg::fail_input("step", "step must be positive and finite");
    const bileg::Side s = side == BILEG_LEFT ? bileg::Side::Left : bileg::Side::Right;
    const bileg::Quat axis = quat(xi);
    const bileg::SphereCurve r = bileg::reparametrize(c->curve);
    const bileg::Quat g0 = start ? quat(start) : bileg::hopf_section(axis, s, bileg::Quat::pure(r.eval(r.t0()).c));
    auto* l = new bileg_lift;
    try {
      l->lift = bileg::horizontal_lift(r, axis, s, g0, step);
    } catch (...) {
      delete l;
      throw;
    }
    l->period = r.period();
    l->closed = r.closed();
    *out = l;
    return BILEG_OK;
  });
}

void bileg_lift_free(bileg_lift* l) { delete l; }

size_t bileg_lift_size(const bileg_lift* l) { return l ? l->lift.q.size() : 0; }

int bileg_lift_sample(const bileg_lift* l, size_t n, double* t, double q[4]) {
  if (!l) return null_arg("lift");
  if (n >= l->lift.q.size()) return set_error(BILEG_ERR_INPUT, "index", "sample index out of range");
  if (t) *t = l->lift.param(n);
  if (q) put(l->lift.q[n], q);
  return BILEG_OK;
}

double bileg_lift_horizontality(const bileg_lift* l) { return l ? l->lift.horizontality_residual() : NAN; }

int bileg_lift_holonomy(const bileg_lift* l, double* q) {
  if (!l) return null_arg("lift");
  if (!q) return null_arg("q");
  return guard([&] {
    if (!l->closed) bileg::fail_input("not_closed", "holonomy needs a closed curve");
    *q = bileg::holonomy(l->lift, l->period).q;
    return BILEG_OK;
  });
}

int bileg_lift_write_csv(const bileg_lift* l, const char* path) {
  if (!l) return null_arg("lift");
  if (!path) return null_arg("path");
  return guard([&] {
    bileg::io::write_file_atomic(path, bileg::io::lift_to_csv(l->lift));
    return BILEG_OK;
  });
}

int bileg_surface_construct(const char* spec_json, bileg_surface** out) {
  if (!spec_json) return null_arg("spec_json");
  if (!out) return null_arg("out");
  return guard([&] {
    const bileg::io::ConstructSpec spec = bileg::io::construct_spec_from_json(spec_json);
    *out = new bileg_surface{bileg::io::run_construct(spec)};
    return BILEG_OK;
  });
}

int bileg_surface_load(const char* path, bileg_surface** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = new bileg_surface{bileg::io::surface_from_json(bileg::io::read_file(path))};
    return BILEG_OK;
  });
}

int bileg_surface_save(const bileg_surface* s, const char* path) {
  if (!s) return null_arg("surface");
  if (!path) return null_arg("path");
  return guard([&] {
    bileg::io::write_file_atomic(path, bileg::io::surface_to_json(s->grid));
    return BILEG_OK;
  });
}

void bileg_surface_free(bileg_surface* s) { delete s; }

int bileg_surface_dims(const bileg_surface* s, int* n1, int* n2) {
  if (!s) return null_arg("surface");
  if (n1) *n1 = s->grid.spec.n1;
  if (n2) *n2 = s->grid.spec.n2;
  return BILEG_OK;
}

int bileg_surface_sample(const bileg_surface* s, int component, int i, int j, double out[4]) {
  if (!s) return null_arg("surface");
  if (!out) return null_arg("out");
  const bileg::GridSpec& g = s->grid.spec;
  if (component != 0 && component != 1) return set_error(BILEG_ERR_INPUT, "component", "component must be 0 or 1");
  if (i < 0 || j < 0 || i >= g.n1 || j >= g.n2) return set_error(BILEG_ERR_INPUT, "index", "node out of range");
  put(component == 0 ? s->grid.x_at(i, j) : s->grid.y_at(i, j), out);
  return BILEG_OK;
}

int bileg_factorize(const bileg_surface* s, double tol, const char* out_path, double* reconstruction) {
  if (!s) return null_arg("surface");
  return guard([&] {
    if (!(tol > 0)) bileg::fail_input("tolerance", "tolerance must be positive");
    const bileg::FactorizeResult r = bileg::factorize(s->grid, tol);
    if (reconstruction) *reconstruction = r.reconstruction;
    if (out_path) bileg::io::write_file_atomic(out_path, bileg::io::factors_to_json(r.factors));
    return BILEG_OK;
  });
}

int bileg_verify(const bileg_surface* s, const char* config_path, double tol_override, char** report_json,
                 int* passed) {
  if (!s) return null_arg("surface");
  return guard([&] {
    bileg::io::Tolerances tols;
    if (config_path) tols = bileg::io::Tolerances::from_json(bileg::io::read_file(config_path), config_path);
    if (tol_override > 0) {
      tols.default_tol = tol_override;
      tols.overrides.clear();
      tols.source += " (overridden)";
    }
    nlohmann::json rep = {{"format", bileg::io::kFormat}, {"kind", "verify"}};
    nlohmann::json t = {{"source", tols.source}, {"default", tols.default_tol}};
    for (const auto& [n, v] : tols.overrides) t["residuals"][n] = v;
    rep["tolerances"] = t;
    nlohmann::json entries = nlohmann::json::array();
    bool ok = true;
    int status = BILEG_OK;
    const double inv = bileg::grid_invariant_residual(s->grid);
    if (!(inv <= 1e-9)) {
      entries.push_back({{"name", "pointwise"}, {"value", inv}, {"tol", 1e-9}, {"pass", false}});
      rep["error"] = "samples violate |X| = |Y| = 1, b(X, Y) = 0";
      ok = false;
    } else {
      try {
        const bileg::ResidualReport r = bileg::residual_suite(s->grid);
        rep["analytic_derivatives"] = r.analytic;
        for (const auto& e : r.entries) {
          const double tol = tols.of(e.name);
          const bool pass = e.value <= tol;
          ok = ok && pass;
          entries.push_back({{"name", e.name}, {"value", e.value}, {"tol", tol}, {"pass", pass}});
        }
      } catch (const bileg::Error& e) {
        if (e.kind() != bileg::ErrorKind::Precondition) throw;
        rep["error"] = e.what();
        ok = false;
        status = set_error(BILEG_ERR_MATH, e.code(), "residual suite failed, see report");
      }
    }
    rep["residuals"] = entries;
    rep["passed"] = ok;
    if (passed) *passed = ok ? 1 : 0;
    if (report_json) *report_json = dup(rep.dump(2));
    return status;
  });
}

int bileg_angle(const bileg_surface* s, const char* csv_path, char** summary_json) {
  if (!s) return null_arg("surface");
  return guard([&] {
    const bileg::AngleData a = bileg::angle_function(s->grid);
    if (csv_path) bileg::io::write_file_atomic(csv_path, bileg::io::angle_to_csv(s->grid, a));
    if (summary_json) {
      nlohmann::json j = {{"format", bileg::io::kFormat},
                          {"kind", "angle"},
                          {"theta0", a.theta0},
                          {"wave_residual", a.wave_residual},
                          {"split_residual", a.split_residual},
                          {"frame_residual", a.frame_residual},
                          {"curvature_residual", a.curvature_residual},
                          {"cubic_residual", a.cubic_residual}};
      *summary_json = dup(j.dump(2));
    }
    return BILEG_OK;
  });
}

int bileg_export_obj(const bileg_surface* s, const double pole[4], int component, const char* path, size_t* vertices,
                     size_t* faces) {
  if (!s) return null_arg("surface");
  if (!pole) return null_arg("pole");
  if (!path) return null_arg("path");
  return guard([&] {
    const bileg::io::ObjMesh m = bileg::io::stereographic_mesh(s->grid, quat(pole), component);
    bileg::io::write_file_atomic(path, bileg::io::mesh_to_obj(m));
    if (vertices) *vertices = m.vertices.size();
    if (faces) *faces = m.faces.size();
    return BILEG_OK;
  });
}

}  // extern "C"
