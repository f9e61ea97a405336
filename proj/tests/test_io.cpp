#include <doctest.h>

#include <charconv>
#include <cstring>
#include <filesystem>
#include <map>
#include <set>

#include "bileg/io.hpp"
#include "generators.hpp"

using namespace bileg;
using namespace bileg::io;
using Eigen::Vector3d;

namespace {

std::string data_file(const std::string& name) { return read_file(std::string(BILEG_TEST_DATA) + "/" + name); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const Quat& a, const Quat& b) {
  return same_bits(a.w, b.w) && same_bits(a.x, b.x) && same_bits(a.y, b.y) && same_bits(a.z, b.z);
}

bool same_bits(const std::vector<Quat>& a, const std::vector<Quat>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (!same_bits(a[n], b[n])) return false;
  return true;
}

bool same_bits(const Vector3d& a, const Vector3d& b) {
  return same_bits(a[0], b[0]) && same_bits(a[1], b[1]) && same_bits(a[2], b[2]);
}

bool same_bits(const std::vector<Vector3d>& a, const std::vector<Vector3d>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (!same_bits(a[n], b[n])) return false;
  return true;
}

bool same_bits(const FactorCurve& a, const FactorCurve& b) {
  return same_bits(a.t0, b.t0) && same_bits(a.h, b.h) && same_bits(a.q, b.q) && same_bits(a.dq, b.dq) &&
         same_bits(a.ddq, b.ddq);
}

int count_lines_starting(const std::string& s, const std::string& prefix) {
  int n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t end = s.find('\n', pos);
    if (s.compare(pos, prefix.size(), prefix) == 0) ++n;
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return n;
}

}  // namespace

TEST_CASE("format_double is the shortest exact decimal") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  auto r = gen::rng(51);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(r);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(same_bits(v, back));
    ++checked;
  }
}

TEST_CASE("surface files round-trip bit-exactly") {
  auto r = gen::rng(52);
  const auto s = GridSpec::make(-0.3, 1.1, 15, -1, 0.7, 18);
  Factorization f;
  f.a = gen::unit_quat(r);
  f.b = f.a * Quat::pure(gen::unit3(r));
  const Vector3d n1 = f.axis1().imag_vec().normalized(), n2 = f.axis2().imag_vec().normalized();
  Vector3d u1 = gen::unit3(r), u2 = gen::unit3(r);
  u1 = (u1 - u1.dot(n1) * n1).normalized();
  u2 = (u2 - u2.dot(n2) * n2).normalized();
  f.g1 = exp_factor(Quat::pure(u1), s.x0, s.h1(), s.n1);
  f.g2 = exp_factor(Quat::pure(u2), s.y0, s.h2(), s.n2);
  const auto g = construct(f, s);

  const std::string text = surface_to_json(g);
  const auto back = surface_from_json(text);
  CHECK(same_bits(back.X, g.X));
  CHECK(same_bits(back.Y, g.Y));
  CHECK(same_bits(back.spec.x0, s.x0));
  CHECK(same_bits(back.spec.y1, s.y1));
  CHECK(back.spec.n1 == s.n1);
  REQUIRE(back.factors.has_value());
  CHECK(same_bits(back.factors->a, f.a));
  CHECK(same_bits(back.factors->g1, f.g1));
  CHECK(same_bits(back.factors->g2, f.g2));
  CHECK(surface_to_json(back) == text);

  ImmersionGrid bare = g;
  bare.factors.reset();
  CHECK_FALSE(surface_from_json(surface_to_json(bare)).factors.has_value());

  const auto fb = factors_from_json(factors_to_json(f));
  CHECK(same_bits(fb.b, f.b));
  CHECK(same_bits(fb.g1, f.g1));
}

TEST_CASE("curve specs round-trip bit-exactly") {
  auto r = gen::rng(53);
  for (const char* kind : {"great_circle", "latitude", "fourier", "samples"}) {
    CurveSpec c;
    c.kind = kind;
    c.axis = gen::unit3(r);
    c.colatitude = gen::uniform(r, 0.1, 3.0);
    c.start = gen::unit3(r);
    if (c.kind == "fourier") {
      const auto fc = gen::fourier_curve(r);
      c.cos_coeffs = fc.cos_coeffs;
      c.sin_coeffs = fc.sin_coeffs;
    }
    if (c.kind == "samples") {
      for (int n = 0; n < 7; ++n) c.points.push_back(gen::unit3(r));
      c.closed = false;
    }
    const std::string text = curve_spec_to_json(c);
    const auto back = curve_spec_from_json(text);
    CHECK(back.kind == c.kind);
    CHECK(same_bits(back.axis, c.axis));
    if (c.kind == "latitude") CHECK(same_bits(back.colatitude, c.colatitude));
    REQUIRE(back.start.has_value());
    CHECK(same_bits(*back.start, *c.start));
    CHECK(same_bits(back.cos_coeffs, c.cos_coeffs));
    CHECK(same_bits(back.sin_coeffs, c.sin_coeffs));
    CHECK(same_bits(back.points, c.points));
    CHECK(back.closed == c.closed);
    CHECK(curve_spec_to_json(back) == text);
  }
}

TEST_CASE("curve fixtures decode to the expected curves") {
  const auto gc = curve_spec_from_json(data_file("great_circle.json")).to_curve();
  CHECK(signed_area(gc) == doctest::Approx(2 * M_PI).epsilon(1e-12));
  const auto lat = curve_spec_from_json(data_file("latitude_pi3.json")).to_curve();
  CHECK(signed_area(lat) == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK_FALSE(curve_spec_from_json(data_file("open_arc.json")).to_curve().closed());
  CHECK(std::abs(signed_area(curve_spec_from_json(data_file("point.json")).to_curve())) < 1e-12);
}

TEST_CASE("malformed input is an input error") {
  CHECK(gen::throws_kind([] { curve_spec_from_json(data_file("malformed.json")); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { curve_spec_from_json(R"({"kind": "great_circle"})"); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { curve_spec_from_json(R"({"format": "bileg/0", "kind": "great_circle"})"); },
                         ErrorKind::Input));
  CHECK(gen::throws_kind([] { curve_spec_from_json(R"({"format": "bileg/1", "kind": "spiral"})"); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { curve_spec_from_json(R"({"format": "bileg/1", "kind": "latitude", "axis": [1, 2]})"); },
                         ErrorKind::Input));
  CHECK(gen::throws_kind(
      [] { curve_spec_from_json(R"({"format": "bileg/1", "kind": "great_circle", "axis": [0, 0, 2]})").to_curve(); },
      ErrorKind::Input));
  CHECK(gen::throws_kind(
      [] {
        curve_spec_from_json(R"({"format": "bileg/1", "kind": "latitude", "axis": [0, 0, 1], "closed": false})")
            .to_curve();
      },
      ErrorKind::Input));
  const std::string bad_shape =
      R"({"format": "bileg/1", "kind": "surface", "grid": {"x0": 0, "x1": 1, "n1": 2, "y0": 0, "y1": 1, "n2": 2},
          "X": [[1, 0, 0, 0]], "Y": [[0, 0, 0, 1]]})";
  CHECK(gen::throws_kind([&] { surface_from_json(bad_shape); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { surface_from_json("[]"); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { read_file("/nonexistent/file.json"); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { construct_spec_from_json(R"({"format": "bileg/1", "method": "magic",
        "grid": {"x0": 0, "x1": 1, "n1": 2, "y0": 0, "y1": 1, "n2": 2}})"); },
                         ErrorKind::Input));
}

TEST_CASE("quaternion parsing") {
  CHECK(same_bits(parse_quat("i"), Quat::i()));
  CHECK(same_bits(parse_quat("-k"), -Quat::k()));
  CHECK(same_bits(parse_quat("1"), Quat::one()));
  CHECK(same_bits(parse_quat("[0.5, -0.5, 0.5, 0.5]"), Quat{0.5, -0.5, 0.5, 0.5}));
  CHECK(same_bits(parse_quat("0.7071067811865476,0,0,0.7071067811865476"),
                  Quat{0.7071067811865476, 0, 0, 0.7071067811865476}));
  for (const char* bad : {"", "x", "1,2,3", "1,2,3,4,5", "a,b,c,d", "1,,2,3"})
    CHECK(gen::throws_kind([&] { parse_quat(bad); }, ErrorKind::Input));
}

TEST_CASE("tolerance files") {
  const auto t = Tolerances::from_json(R"({"format": "bileg/1", "default": 1e-6, "residuals": {"omega_i": 1e-9}})", "x");
  CHECK(t.of("omega_i") == 1e-9);
  CHECK(t.of("metric") == 1e-6);
  CHECK(t.source == "x");
  const auto shipped = Tolerances::from_json(read_file(std::string(BILEG_CONFIG_DIR) + "/tolerances.json"), "config");
  CHECK(shipped.default_tol == 1e-6);
  CHECK(gen::throws_kind([] { Tolerances::from_json(R"({"format": "bileg/1", "default": -1})", "x"); }, ErrorKind::Input));
  CHECK(gen::throws_kind([] { Tolerances::from_json(R"({"format": "bileg/1"})", "x"); }, ErrorKind::Input));
}

TEST_CASE("CSV writers") {
  const auto lift = horizontal_lift(reparametrize(SphereCurve::great_circle(Vector3d(0, -1, 0), nullptr)), Quat::i(),
                                    Side::Left, hopf_section(Quat::i(), Side::Left, Quat::pure(Vector3d(1, 0, 0))), 1e-2);
  const std::string csv = lift_to_csv(lift);
  CHECK(csv.rfind("t,q0,q1,q2,q3\n", 0) == 0);
  CHECK(count_lines_starting(csv, "") == static_cast<int>(lift.q.size()) + 1);

  const auto s = GridSpec::make(0, 1, 7, 0, 1, 6);
  Factorization f;
  f.g1 = exp_factor(Quat::i(), s.x0, s.h1(), s.n1);
  f.g2 = exp_factor(Quat::j(), s.y0, s.h2(), s.n2);
  const auto g = construct(f, s);
  const std::string ac = angle_to_csv(g, angle_function(g));
  CHECK(ac.rfind("i,j,x1,x2,theta\n", 0) == 0);
  CHECK(count_lines_starting(ac, "") == 43);
}

TEST_CASE("atomic writes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bileg_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  fs::remove_all(dir);
  CHECK(gen::throws_kind([] { write_file_atomic("/nonexistent/dir/out.txt", "x"); }, ErrorKind::Input));
}

TEST_CASE("OBJ export of a small open grid") {
  const auto s = GridSpec::make(0, 1, 3, 0, 1, 3);
  Factorization f;
  f.g1 = exp_factor(Quat::i(), s.x0, s.h1(), s.n1);
  f.g2 = exp_factor(Quat::j(), s.y0, s.h2(), s.n2);
  const auto g = construct(f, s);
  const auto m = stereographic_mesh(g, -Quat::one(), 0);
  CHECK_FALSE(m.wrap1);
  CHECK(m.vertices.size() == 9u);
  CHECK(m.faces.size() == 8u);
  const std::string obj = mesh_to_obj(m);
  CHECK(count_lines_starting(obj, "v ") == 9);
  CHECK(count_lines_starting(obj, "f ") == 8);
  CHECK(gen::throws_kind([&] { stereographic_mesh(g, Quat::one(), 0); }, ErrorKind::Precondition));
  CHECK(gen::throws_kind([&] { stereographic_mesh(g, Quat::one() * 2, 0); }, ErrorKind::Input));
  CHECK(gen::throws_kind([&] { stereographic_mesh(g, -Quat::one(), 2); }, ErrorKind::Input));
}

TEST_CASE("OBJ export of the Clifford torus is a closed torus") {
  const auto spec = construct_spec_from_json(data_file("clifford.json"));
  const auto g = run_construct(spec);
  CHECK(residual_suite(g).max() < 1e-6);
  const Quat pole{0.7071067811865476, 0, 0, 0.7071067811865476};
  for (int component : {0, 1}) {
    const auto m = stereographic_mesh(g, pole.normalized(), component);
    CHECK(m.wrap1);
    CHECK(m.wrap2);
    CHECK(m.vertices.size() == 64u * 64u);
    std::set<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, int> uses;
    for (const auto& f : m.faces)
      for (int e = 0; e < 3; ++e) {
        const int a = f[e], b = f[(e + 1) % 3];
        const auto key = std::minmax(a, b);
        edges.insert(key);
        ++uses[key];
      }
    const long chi = static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.faces.size());
    CHECK(chi == 0);
    bool manifold = true;
    for (const auto& [e, n] : uses) manifold = manifold && n == 2;
    CHECK(manifold);
    for (const auto& v : m.vertices) CHECK(v.allFinite());
  }
  // X passes through 1.
  CHECK(gen::throws_kind([&] { stereographic_mesh(g, Quat::one(), 0); }, ErrorKind::Precondition));
}
