#include "bileg/io.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "bileg/error.hpp"

namespace bileg::io {

using nlohmann::json;
using Eigen::Vector3d;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail_input("parse", e.what());
  }
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail_input("schema", std::string(what) + ": " + e.what());
  }
}

void check_format(const json& j) {
  if (!j.is_object()) fail_input("schema", "top level must be an object");
  if (!j.contains("format") || j.at("format") != kFormat)
    fail_input("format", std::string("missing or unsupported format tag, expected ") + kFormat);
}

json vec3(const Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

Vector3d to_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) fail_input("schema", "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json quat(const Quat& q) { return json::array({q.w, q.x, q.y, q.z}); }

Quat to_quat(const json& j) {
  if (!j.is_array() || j.size() != 4) fail_input("schema", "expected a quaternion [w, x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json quats(const std::vector<Quat>& v) {
  json a = json::array();
  for (const Quat& q : v) a.push_back(quat(q));
  return a;
}

std::vector<Quat> to_quats(const json& j) {
  if (!j.is_array()) fail_input("schema", "expected a list of quaternions");
  std::vector<Quat> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(to_quat(e));
  return out;
}

json grid_json(const GridSpec& s) {
  return {{"x0", s.x0}, {"x1", s.x1}, {"n1", s.n1}, {"y0", s.y0}, {"y1", s.y1}, {"n2", s.n2}};
}

GridSpec to_grid(const json& j) {
  return GridSpec::make(j.at("x0").get<double>(), j.at("x1").get<double>(), j.at("n1").get<int>(),
                        j.at("y0").get<double>(), j.at("y1").get<double>(), j.at("n2").get<int>());
}

json curve_json(const FactorCurve& c) {
  json j = {{"t0", c.t0}, {"h", c.h}, {"q", quats(c.q)}};
  if (c.has_derivatives()) {
    j["dq"] = quats(c.dq);
    j["ddq"] = quats(c.ddq);
  }
  return j;
}

FactorCurve to_factor_curve(const json& j) {
  FactorCurve c;
  c.t0 = j.at("t0").get<double>();
  c.h = j.at("h").get<double>();
  c.q = to_quats(j.at("q"));
  if (j.contains("dq")) c.dq = to_quats(j.at("dq"));
  if (j.contains("ddq")) c.ddq = to_quats(j.at("ddq"));
  if (c.q.empty()) fail_input("schema", "factor curve has no samples");
  if ((!c.dq.empty() || !c.ddq.empty()) && !c.has_derivatives())
    fail_input("schema", "factor derivative arrays must match the sample count");
  return c;
}

json factorization_json(const Factorization& f) {
  return {{"a", quat(f.a)}, {"b", quat(f.b)}, {"g1", curve_json(f.g1)}, {"g2", curve_json(f.g2)}};
}

Factorization to_factorization(const json& j) {
  Factorization f;
  f.a = to_quat(j.at("a"));
  f.b = to_quat(j.at("b"));
  f.g1 = to_factor_curve(j.at("g1"));
  f.g2 = to_factor_curve(j.at("g2"));
  return f;
}

CurveSpec curve_from(const json& j) {
  CurveSpec c;
  c.kind = j.at("kind").get<std::string>();
  if (j.contains("axis")) c.axis = to_vec3(j.at("axis"));
  if (j.contains("colatitude")) c.colatitude = j.at("colatitude").get<double>();
  if (j.contains("start")) c.start = to_vec3(j.at("start"));
  if (j.contains("closed")) c.closed = j.at("closed").get<bool>();
  if (j.contains("cos")) for (const auto& v : j.at("cos")) c.cos_coeffs.push_back(to_vec3(v));
  if (j.contains("sin")) for (const auto& v : j.at("sin")) c.sin_coeffs.push_back(to_vec3(v));
  if (j.contains("points")) for (const auto& v : j.at("points")) c.points.push_back(to_vec3(v));
  if (c.kind != "fourier" && c.kind != "samples" && c.kind != "latitude" && c.kind != "great_circle")
    fail_input("curve_kind", "unknown curve kind '" + c.kind + "'");
  return c;
}

json curve_to(const CurveSpec& c) {
  json j = {{"kind", c.kind}, {"axis", vec3(c.axis)}, {"closed", c.closed}};
  if (c.kind == "latitude") j["colatitude"] = c.colatitude;
  if (c.start) j["start"] = vec3(*c.start);
  auto list = [](const std::vector<Vector3d>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back(vec3(e));
    return a;
  };
  if (!c.cos_coeffs.empty() || c.kind == "fourier") j["cos"] = list(c.cos_coeffs);
  if (!c.sin_coeffs.empty() || c.kind == "fourier") j["sin"] = list(c.sin_coeffs);
  if (!c.points.empty() || c.kind == "samples") j["points"] = list(c.points);
  return j;
}

}  // namespace

SphereCurve CurveSpec::to_curve() const {
  if (kind == "latitude" || kind == "great_circle") {
    if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9) fail_input("axis", "curve axis must be a unit vector");
    if (!closed) fail_input("closed", "circles are closed");
    const Vector3d* s = start ? &*start : nullptr;
    return kind == "latitude" ? SphereCurve::latitude(axis, colatitude, s) : SphereCurve::great_circle(axis, s);
  }
  if (kind == "fourier") {
    if (!closed) fail_input("closed", "trigonometric curves are closed");
    return SphereCurve::fourier(cos_coeffs, sin_coeffs);
  }
  if (kind == "samples") return SphereCurve::from_points(points, closed);
  fail_input("curve_kind", "unknown curve kind '" + kind + "'");
}

std::string curve_spec_to_json(const CurveSpec& c) {
  json j = curve_to(c);
  j["format"] = kFormat;
  return j.dump(2);
}

CurveSpec curve_spec_from_json(const std::string& text) {
  const json j = parse(text);
  check_format(j);
  return guarded("curve", [&] { return curve_from(j); });
}

std::string surface_to_json(const ImmersionGrid& g) {
  json j = {{"format", kFormat}, {"kind", "surface"}, {"grid", grid_json(g.spec)}, {"X", quats(g.X)}, {"Y", quats(g.Y)}};
  if (g.factors) j["factors"] = factorization_json(*g.factors);
  return j.dump();
}

ImmersionGrid surface_from_json(const std::string& text) {
  const json j = parse(text);
  check_format(j);
  return guarded("surface", [&] {
    ImmersionGrid g;
    g.spec = to_grid(j.at("grid"));
    g.X = to_quats(j.at("X"));
    g.Y = to_quats(j.at("Y"));
    if (g.X.size() != g.spec.size() || g.Y.size() != g.spec.size())
      fail_input("shape", "X and Y must hold n1·n2 samples");
    if (j.contains("factors")) g.factors = to_factorization(j.at("factors"));
    return g;
  });
}

std::string factors_to_json(const Factorization& f) {
  json j = factorization_json(f);
  j["format"] = kFormat;
  j["kind"] = "factors";
  return j.dump();
}

Factorization factors_from_json(const std::string& text) {
  const json j = parse(text);
  check_format(j);
  return guarded("factors", [&] { return to_factorization(j); });
}

ConstructSpec construct_spec_from_json(const std::string& text) {
  const json j = parse(text);
  check_format(j);
  return guarded("construct", [&] {
    ConstructSpec s;
    s.method = j.at("method").get<std::string>();
    s.grid = to_grid(j.at("grid"));
    if (j.contains("a")) s.a = to_quat(j.at("a"));
    if (j.contains("b")) s.b = to_quat(j.at("b"));
    if (s.method == "factors-exp") {
      s.u1 = to_quat(j.at("u1"));
      s.u2 = to_quat(j.at("u2"));
    } else if (s.method == "ansatz") {
      s.c1 = curve_from(j.at("c1"));
      s.c2 = curve_from(j.at("c2"));
      if (j.contains("step")) s.step = j.at("step").get<double>();
      if (j.contains("cover")) s.cover = j.at("cover").get<int>();
    } else if (s.method == "theta") {
      s.theta0 = j.at("theta0").get<double>();
      s.f = j.at("f").get<std::vector<double>>();
      s.g = j.at("g").get<std::vector<double>>();
    } else {
      fail_input("method", "unknown construct method '" + s.method + "'");
    }
    return s;
  });
}

ImmersionGrid run_construct(const ConstructSpec& s) {
  if (s.method == "factors-exp") {
    Factorization f;
    f.a = s.a;
    f.b = s.b;
    f.g1 = exp_factor(s.u1, s.grid.x0, s.grid.h1(), s.grid.n1);
    f.g2 = exp_factor(s.u2, s.grid.y0, s.grid.h2(), s.grid.n2);
    return construct(f, s.grid);
  }
  if (s.method == "ansatz") {
    if (!(s.step > 0)) fail_input("step", "step must be positive");
    return torus_ansatz(s.c1.to_curve(), s.c2.to_curve(), s.a, s.b, s.grid, s.step, s.cover).grid;
  }
  if (s.method == "theta") return from_theta(s.theta0, s.f, s.g, s.grid);
  fail_input("method", "unknown construct method '" + s.method + "'");
}

double Tolerances::of(const std::string& name) const {
  for (const auto& [n, v] : overrides)
    if (n == name) return v;
  return default_tol;
}

Tolerances Tolerances::from_json(const std::string& text, const std::string& source) {
  const json j = parse(text);
  check_format(j);
  return guarded("tolerances", [&] {
    Tolerances t;
    t.source = source;
    t.default_tol = j.at("default").get<double>();
    if (j.contains("residuals"))
      for (const auto& [k, v] : j.at("residuals").items()) t.overrides.emplace_back(k, v.get<double>());
    if (!(t.default_tol > 0)) fail_input("tolerance", "tolerances must be positive");
    for (const auto& o : t.overrides)
      if (!(o.second > 0)) fail_input("tolerance", "tolerances must be positive");
    return t;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("io", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::random_device rd;
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail_input("io", "cannot write '" + tmp.string() + "'");
    out << data;
    out.flush();
    if (!out) fail_input("io", "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail_input("io", "cannot replace '" + path + "'");
  }
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string lift_to_csv(const HorizontalCurve& lift) {
  std::string s = "t,q0,q1,q2,q3\n";
  for (std::size_t n = 0; n < lift.q.size(); ++n) {
    const Quat& q = lift.q[n];
    s += format_double(lift.param(n)) + "," + format_double(q.w) + "," + format_double(q.x) + "," +
         format_double(q.y) + "," + format_double(q.z) + "\n";
  }
  return s;
}

std::string angle_to_csv(const ImmersionGrid& g, const AngleData& a) {
  std::string s = "i,j,x1,x2,theta\n";
  for (int j = 0; j < g.spec.n2; ++j)
    for (int i = 0; i < g.spec.n1; ++i)
      s += std::to_string(i) + "," + std::to_string(j) + "," + format_double(g.spec.x(i)) + "," +
           format_double(g.spec.y(j)) + "," + format_double(a.theta[g.spec.index(i, j)]) + "\n";
  return s;
}

ObjMesh stereographic_mesh(const ImmersionGrid& g, const Quat& pole_in, int component) {
  if (component != 0 && component != 1) fail_input("component", "component must be X or Y");
  if (std::abs(pole_in.norm() - 1.0) > 1e-9) fail_input("pole", "pole must be a unit quaternion");
  const Eigen::Vector4d p = pole_in.vec();
  // Orthonormal basis of p^⊥.
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity() - p * p.transpose();
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(M, Eigen::ComputeFullU);
  const Eigen::Matrix<double, 4, 3> basis = svd.matrixU().leftCols<3>();

  const GridSpec& s = g.spec;
  const std::vector<Quat>& V = component == 0 ? g.X : g.Y;
  if (V.size() != s.size()) fail_input("shape", "sample count does not match the grid");
  ObjMesh m;
  auto close = [&](std::size_t a, std::size_t b) { return distance(V[a], V[b]) < 1e-9; };
  m.wrap1 = s.n1 > 2;
  for (int j = 0; j < s.n2 && m.wrap1; ++j) m.wrap1 = close(s.index(0, j), s.index(s.n1 - 1, j));
  m.wrap2 = s.n2 > 2;
  for (int i = 0; i < s.n1 && m.wrap2; ++i) m.wrap2 = close(s.index(i, 0), s.index(i, s.n2 - 1));
  const int c1 = m.wrap1 ? s.n1 - 1 : s.n1, c2 = m.wrap2 ? s.n2 - 1 : s.n2;

  for (int j = 0; j < c2; ++j)
    for (int i = 0; i < c1; ++i) {
      const Eigen::Vector4d q = V[s.index(i, j)].vec();
      const double d = 1.0 - q.dot(p);
      if (d < 1e-9) fail_math("pole_collision", "the surface passes through the projection pole");
      m.vertices.push_back(basis.transpose() * (q - q.dot(p) * p) / d);
    }
  auto vid = [&](int i, int j) { return (j % c2) * c1 + (i % c1); };
  for (int j = 0; j + 1 < s.n2; ++j)
    for (int i = 0; i + 1 < s.n1; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  return m;
}

std::string mesh_to_obj(const ObjMesh& m) {
  std::string s = "# stereographic projection, " + std::to_string(m.vertices.size()) + " vertices\n";
  for (const auto& v : m.vertices)
    s += "v " + format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]) + "\n";
  for (const auto& f : m.faces)
    s += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  return s;
}

Quat parse_quat(const std::string& in) {
  std::string s;
  for (char ch : in)
    if (ch != ' ' && ch != '[' && ch != ']') s += ch;
  if (s.empty()) fail_input("quaternion", "empty quaternion");
  double sign = 1;
  std::string t = s;
  if (t[0] == '-' || t[0] == '+') {
    sign = t[0] == '-' ? -1 : 1;
    t = t.substr(1);
  }
  if (t == "1") return Quat::one() * sign;
  if (t == "i") return Quat::i() * sign;
  if (t == "j") return Quat::j() * sign;
  if (t == "k") return Quat::k() * sign;
  std::array<double, 4> c{};
  std::size_t pos = 0;
  for (int n = 0; n < 4; ++n) {
    const std::size_t end = n < 3 ? s.find(',', pos) : s.size();
    if (end == std::string::npos) fail_input("quaternion", "expected i, j, k, 1 or w,x,y,z: '" + in + "'");
    const std::string tok = s.substr(pos, end - pos);
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), c[n]);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
      fail_input("quaternion", "bad number '" + tok + "' in '" + in + "'");
    pos = end + 1;
  }
  return {c[0], c[1], c[2], c[3]};
}

}  // namespace bileg::io
