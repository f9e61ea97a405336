// Command-line front end. Exit codes: 0 success, 2 invalid input, 3 mathematical precondition failure.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bileg/bileg.h"

namespace {

constexpr int kInputError = 2;

int report(int status) {
  if (status != BILEG_OK) std::cerr << "error [" << bileg_last_error_code() << "]: " << bileg_last_error() << "\n";
  return status;
}

std::string read_text(const std::string& path, int& status) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error [io]: cannot open '" << path << "'\n";
    status = kInputError;
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  status = BILEG_OK;
  return ss.str();
}

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error [io]: cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

struct Surface {
  bileg_surface* s = nullptr;
  ~Surface() { bileg_surface_free(s); }
};

std::string default_config() {
  if (const char* env = std::getenv("BILEG_CONFIG")) return env;
#ifdef BILEG_CONFIG_DIR
  const std::string p = std::string(BILEG_CONFIG_DIR) + "/tolerances.json";
  if (std::ifstream(p)) return p;
#endif
  return {};
}

int cmd_lift(const std::string& curve_path, const std::string& axis_s, const std::string& side_s,
             const std::string& start_s, double step, const std::string& out) {
  double axis[4], start[4];
  if (int st = bileg_parse_quat(axis_s.c_str(), axis)) return report(st);
  const bool has_start = !start_s.empty();
  if (has_start)
    if (int st = bileg_parse_quat(start_s.c_str(), start)) return report(st);
  bileg_curve* c = nullptr;
  if (int st = bileg_curve_load(curve_path.c_str(), &c)) return report(st);
  bileg_lift* l = nullptr;
  int st = bileg_lift_compute(c, axis, side_s == "left" ? BILEG_LEFT : BILEG_RIGHT, has_start ? start : nullptr, step, &l);
  if (st == BILEG_OK) st = bileg_lift_write_csv(l, out.c_str());
  if (st == BILEG_OK) {
    const size_t n = bileg_lift_size(l);
    double t, q[4];
    bileg_lift_sample(l, n - 1, &t, q);
    std::printf("samples %zu\n", n);
    std::printf("endpoint t=%.12g q=[%.12g, %.12g, %.12g, %.12g]\n", t, q[0], q[1], q[2], q[3]);
    std::printf("horizontality %.3e\n", bileg_lift_horizontality(l));
    double hq;
    if (bileg_lift_holonomy(l, &hq) == BILEG_OK) std::printf("holonomy q %.12g\n", hq);
  }
  bileg_lift_free(l);
  bileg_curve_free(c);
  return report(st);
}

int cmd_area(const std::string& curve_path) {
  bileg_curve* c = nullptr;
  if (int st = bileg_curve_load(curve_path.c_str(), &c)) return report(st);
  bileg_area_report r{};
  const int st = bileg_curve_area(c, &r);
  bileg_curve_free(c);
  if (st) return report(st);
  std::printf("area mod 4pi %.12g\n", r.area);
  std::printf("q mod 1 %.12g\n", r.q);
  if (r.snapped)
    std::printf("q snap %ld/%ld\n", r.num, r.den);
  else
    std::printf("q snap none\n");
  return 0;
}

int cmd_construct(const std::string& spec_path, const std::string& out) {
  int st;
  const std::string spec = read_text(spec_path, st);
  if (st) return st;
  Surface s;
  if ((st = bileg_surface_construct(spec.c_str(), &s.s))) return report(st);
  if ((st = bileg_surface_save(s.s, out.c_str()))) return report(st);
  int n1, n2;
  bileg_surface_dims(s.s, &n1, &n2);
  std::printf("wrote %dx%d immersion to %s\n", n1, n2, out.c_str());
  return 0;
}

int cmd_factorize(const std::string& in, const std::string& out, double tol) {
  Surface s;
  if (int st = bileg_surface_load(in.c_str(), &s.s)) return report(st);
  double rec = 0;
  if (int st = bileg_factorize(s.s, tol, out.c_str(), &rec)) return report(st);
  std::printf("reconstruction %.3e\n", rec);
  return 0;
}

int cmd_verify(const std::string& in, const std::string& config, double tol, const std::string& out) {
  Surface s;
  if (int st = bileg_surface_load(in.c_str(), &s.s)) return report(st);
  const std::string cfg = config.empty() ? default_config() : config;
  char* rep = nullptr;
  int passed = 0;
  const int st = bileg_verify(s.s, cfg.empty() ? nullptr : cfg.c_str(), tol, &rep, &passed);
  if (rep) {
    write_text(out, std::string(rep) + "\n");
    bileg_string_free(rep);
  }
  if (st) return report(st);
  return passed ? 0 : BILEG_ERR_MATH;
}

int cmd_angle(const std::string& in, const std::string& out) {
  Surface s;
  if (int st = bileg_surface_load(in.c_str(), &s.s)) return report(st);
  char* summary = nullptr;
  if (int st = bileg_angle(s.s, out.c_str(), &summary)) return report(st);
  std::printf("%s\n", summary);
  bileg_string_free(summary);
  return 0;
}

int cmd_export(const std::string& in, const std::string& format, const std::string& pole_s,
               const std::string& component, const std::string& out) {
  if (format != "obj") {
    std::cerr << "error [format]: only obj export is supported\n";
    return kInputError;
  }
  double pole[4];
  if (int st = bileg_parse_quat(pole_s.c_str(), pole)) return report(st);
  Surface s;
  if (int st = bileg_surface_load(in.c_str(), &s.s)) return report(st);
  size_t v = 0, f = 0;
  if (int st = bileg_export_obj(s.s, pole, component == "Y" ? 1 : 0, out.c_str(), &v, &f)) return report(st);
  std::printf("vertices %zu faces %zu\n", v, f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilegendrian surfaces in the unit tangent bundle of S³: lifts, construction, verification"};
  app.require_subcommand(1);

  std::string curve, axis = "i", side = "left", start, out, in, spec, config, pole = "1", component = "X",
                     format = "obj";
  double step = 1e-3, tol = 0, ftol = 1e-6;

  auto* lift = app.add_subcommand("lift", "Horizontal lift of a spherical curve, written as CSV (t, q0..q3)");
  lift->add_option("--curve", curve, "CurveSpec JSON")->required();
  lift->add_option("--axis", axis, "Hopf axis: i, j, k or w,x,y,z");
  lift->add_option("--side", side, "left or right fibration")->check(CLI::IsMember({"left", "right"}));
  lift->add_option("--start", start, "initial point in S³ over the curve start");
  lift->add_option("--step", step, "integrator step");
  lift->add_option("--out", out, "CSV output")->required();

  auto* area = app.add_subcommand("area", "Signed area mod 4π and the holonomy it implies");
  area->add_option("--curve", curve, "closed CurveSpec JSON")->required();

  auto* cons = app.add_subcommand("construct", "Build an immersion from a construct spec");
  cons->add_option("--spec", spec, "construct spec JSON")->required();
  cons->add_option("--out", out, "surface JSON")->required();

  auto* fac = app.add_subcommand("factorize", "Recover (a, b, γ₁, γ₂) from an immersion");
  fac->add_option("--in", in, "surface JSON")->required();
  fac->add_option("--out", out, "factors JSON")->required();
  fac->add_option("--tol", ftol, "reconstruction tolerance");

  auto* ver = app.add_subcommand("verify", "Residual report against configured tolerances");
  ver->add_option("--in", in, "surface JSON")->required();
  ver->add_option("--config", config, "tolerance config (default: BILEG_CONFIG or the bundled file)");
  ver->add_option("--tol", tol, "override every tolerance");
  ver->add_option("--out", out, "report path (default stdout)");

  auto* ang = app.add_subcommand("angle", "Angle function θ on the grid as CSV");
  ang->add_option("--in", in, "surface JSON")->required();
  ang->add_option("--out", out, "CSV output")->required();

  auto* exp = app.add_subcommand("export", "Stereographic mesh of one component");
  exp->add_option("--in", in, "surface JSON")->required();
  exp->add_option("--format", format, "obj");
  exp->add_option("--pole", pole, "projection pole (unit quaternion)");
  exp->add_option("--component", component, "X or Y")->check(CLI::IsMember({"X", "Y"}));
  exp->add_option("--out", out, "OBJ output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  if (*lift) return cmd_lift(curve, axis, side, start, step, out);
  if (*area) return cmd_area(curve);
  if (*cons) return cmd_construct(spec, out);
  if (*fac) return cmd_factorize(in, out, ftol);
  if (*ver) return cmd_verify(in, config, tol, out);
  if (*ang) return cmd_angle(in, out);
  if (*exp) return cmd_export(in, format, pole, component, out);
  return kInputError;
}
