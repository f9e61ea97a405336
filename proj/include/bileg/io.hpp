#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bileg/factory.hpp"
#include "bileg/sphere.hpp"

namespace bileg::io {

inline constexpr const char* kFormat = "bileg/1";

/// Closed or open curve description. `axis` is the circle axis for latitude and great_circle.
struct CurveSpec {
  std::string kind = "great_circle";  ///< fourier | samples | latitude | great_circle
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double colatitude = M_PI / 2;
  std::optional<Eigen::Vector3d> start;
  std::vector<Eigen::Vector3d> cos_coeffs, sin_coeffs;
  std::vector<Eigen::Vector3d> points;
  bool closed = true;

  SphereCurve to_curve() const;
};

std::string curve_spec_to_json(const CurveSpec& c);
CurveSpec curve_spec_from_json(const std::string& text);

/// Grid, samples and optional factor block of an immersion.
std::string surface_to_json(const ImmersionGrid& g);
ImmersionGrid surface_from_json(const std::string& text);

std::string factors_to_json(const Factorization& f);
Factorization factors_from_json(const std::string& text);

/// Input of `construct`: method factors-exp, ansatz or theta.
struct ConstructSpec {
  std::string method = "factors-exp";
  GridSpec grid;
  Quat a = Quat::one(), b = Quat::k();
  Quat u1 = Quat::i(), u2 = Quat::j();  ///< factors-exp generators
  CurveSpec c1, c2;                     ///< ansatz curves
  double step = 1e-3;
  int cover = 4;
  double theta0 = M_PI / 2;             ///< theta method
  std::vector<double> f, g;
};

ConstructSpec construct_spec_from_json(const std::string& text);
ImmersionGrid run_construct(const ConstructSpec& s);

/// Tolerances for verify: one default plus per-residual overrides.
struct Tolerances {
  double default_tol = 1e-6;
  std::vector<std::pair<std::string, double>> overrides;
  std::string source = "builtin";

  double of(const std::string& name) const;
  static Tolerances from_json(const std::string& text, const std::string& source);
};

/// Whole-file read; throws Input on failure.
std::string read_file(const std::string& path);
/// Temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& data);

/// Shortest decimal that reads back to the same double (at most 17 significant digits).
std::string format_double(double v);

std::string lift_to_csv(const HorizontalCurve& lift);
/// Rows i, j, x1, x2, θ.
std::string angle_to_csv(const ImmersionGrid& g, const AngleData& a);

struct ObjMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  ///< zero-based
  bool wrap1 = false, wrap2 = false;
};

/// Stereographic projection of component X (0) or Y (1) from `pole`; periodic axes whose end
/// nodes coincide are glued. Throws Precondition when a node is within 1e-9 of the pole.
ObjMesh stereographic_mesh(const ImmersionGrid& g, const Quat& pole, int component);
std::string mesh_to_obj(const ObjMesh& m);

/// "i", "-k", "1", or "w,x,y,z" (also with brackets).
Quat parse_quat(const std::string& s);

}  // namespace bileg::io
