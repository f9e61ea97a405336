/* C interface to the bilegendrian surface toolkit.
 *
 * Every fallible call returns a status: BILEG_OK, BILEG_ERR_INPUT (malformed or out-of-range
 * input) or BILEG_ERR_MATH (a mathematical precondition fails). The message and short code of
 * the last failure on the calling thread are available from bileg_last_error and
 * bileg_last_error_code. Handles are opaque and owned by the caller; strings returned through
 * char** are released with bileg_string_free.
 */
#ifndef BILEG_BILEG_H
#define BILEG_BILEG_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(BILEG_BUILDING_LIBRARY)
#define BILEG_API __declspec(dllexport)
#else
#define BILEG_API __declspec(dllimport)
#endif
#else
#define BILEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum bileg_status { BILEG_OK = 0, BILEG_ERR_INPUT = 2, BILEG_ERR_MATH = 3, BILEG_ERR_INTERNAL = 4 };

enum bileg_side { BILEG_LEFT = 0, BILEG_RIGHT = 1 };

typedef struct bileg_curve bileg_curve;
typedef struct bileg_lift bileg_lift;
typedef struct bileg_surface bileg_surface;

BILEG_API const char* bileg_version(void);
BILEG_API const char* bileg_last_error(void);
BILEG_API const char* bileg_last_error_code(void);
BILEG_API void bileg_string_free(char* s);

/* "i", "-k", "1" or "w,x,y,z". */
BILEG_API int bileg_parse_quat(const char* text, double out[4]);

/* Curves on S², read from a CurveSpec JSON document. Lifts use the speed-2 reparametrization. */
BILEG_API int bileg_curve_load(const char* path, bileg_curve** out);
BILEG_API int bileg_curve_from_json(const char* json, bileg_curve** out);
BILEG_API void bileg_curve_free(bileg_curve* c);
BILEG_API int bileg_curve_start(const bileg_curve* c, double out[3]);
BILEG_API int bileg_curve_period(const bileg_curve* c, double* out);

typedef struct bileg_area_report {
  double area;       /* signed area reduced to (-2π, 2π] */
  double q;          /* −area/4π reduced to [0, 1) */
  int snapped;       /* 1 when q is a fraction with denominator <= 64 */
  long num, den;
} bileg_area_report;

BILEG_API int bileg_curve_area(const bileg_curve* c, bileg_area_report* out);

/* Horizontal lift for the Hopf fibration with axis xi (unit imaginary). start may be NULL for the
 * canonical section over c(0). The lift covers one period (closed curves) or the whole curve. */
BILEG_API int bileg_lift_compute(const bileg_curve* c, const double xi[4], int side, const double* start, double step,
                                 bileg_lift** out);
BILEG_API void bileg_lift_free(bileg_lift* l);
BILEG_API size_t bileg_lift_size(const bileg_lift* l);
BILEG_API int bileg_lift_sample(const bileg_lift* l, size_t n, double* t, double q[4]);
BILEG_API double bileg_lift_horizontality(const bileg_lift* l);
/* q ∈ [0, 1) of the holonomy over one period of a closed curve. */
BILEG_API int bileg_lift_holonomy(const bileg_lift* l, double* q);
BILEG_API int bileg_lift_write_csv(const bileg_lift* l, const char* path);

/* Immersions φ = (X, Y) sampled on a grid. */
BILEG_API int bileg_surface_construct(const char* spec_json, bileg_surface** out);
BILEG_API int bileg_surface_load(const char* path, bileg_surface** out);
BILEG_API int bileg_surface_save(const bileg_surface* s, const char* path);
BILEG_API void bileg_surface_free(bileg_surface* s);
BILEG_API int bileg_surface_dims(const bileg_surface* s, int* n1, int* n2);
/* component 0 = X, 1 = Y; node (i, j) with i along x₁. */
BILEG_API int bileg_surface_sample(const bileg_surface* s, int component, int i, int j, double out[4]);

/* Recovers (a, b, γ₁, γ₂) and writes the factors document. reconstruction may be NULL. */
BILEG_API int bileg_factorize(const bileg_surface* s, double tol, const char* out_path, double* reconstruction);

/* Residual report as JSON. config_path may be NULL (built-in defaults); tol_override <= 0 keeps
 * the configured values. *passed is 1 when every residual is within its tolerance. */
BILEG_API int bileg_verify(const bileg_surface* s, const char* config_path, double tol_override, char** report_json,
                           int* passed);

/* θ on the grid as CSV (i, j, x1, x2, theta); summary_json may be NULL. */
BILEG_API int bileg_angle(const bileg_surface* s, const char* csv_path, char** summary_json);

/* Stereographic OBJ export of component 0 (X) or 1 (Y) from a unit pole. */
BILEG_API int bileg_export_obj(const bileg_surface* s, const double pole[4], int component, const char* path,
                               size_t* vertices, size_t* faces);

#ifdef __cplusplus
}
#endif

#endif
