#ifndef NTAN_NTAN_H
#define NTAN_NTAN_H

/* C interface to the tangent surface library.  Objects are opaque handles
 * released with the matching _free function.  Every call returns an
 * ntan_status; on failure ntan_last_error() describes the cause for the
 * calling thread.  Strings returned through char** are owned by the caller
 * and released with ntan_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(NTAN_BUILDING_LIBRARY)
#define NTAN_API __declspec(dllexport)
#else
#define NTAN_API __declspec(dllimport)
#endif
#else
#define NTAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define NTAN_ABI_VERSION 1
#define NTAN_MAX_DIMENSION 6

typedef enum ntan_status {
  NTAN_OK = 0,
  NTAN_ERR_PARSE = 1,
  NTAN_ERR_UNKNOWN_IDENTIFIER = 2,
  NTAN_ERR_UNBOUND_VARIABLE = 3,
  NTAN_ERR_DIVISION_BY_ZERO = 4,
  NTAN_ERR_EVALUATION = 5,
  NTAN_ERR_INVALID_ARGUMENT = 6,
  NTAN_ERR_GEODESIC_ESCAPE = 7,
  NTAN_ERR_INTEGRATION_TOLERANCE = 8,
  NTAN_ERR_FRAME_DEGENERATE = 9,
  NTAN_ERR_UNSUPPORTED = 10,
  NTAN_ERR_VALIDATION = 11,
  NTAN_ERR_IO = 12,
  NTAN_ERR_INTERNAL = 99
} ntan_status;

typedef enum ntan_kind {
  NTAN_REGULAR = 0,
  NTAN_CUSPIDAL_EDGE = 1,
  NTAN_FOLDED_UMBRELLA = 2,
  NTAN_SWALLOWTAIL = 3,
  NTAN_OPEN_SWALLOWTAIL = 4,
  NTAN_FOLD = 5,
  NTAN_DEGENERATE_PSI_ZERO = 6,
  NTAN_UNRESOLVED = 7
} ntan_kind;

typedef struct ntan_connection ntan_connection;
typedef struct ntan_curve ntan_curve;
typedef struct ntan_surface ntan_surface;

NTAN_API uint32_t ntan_abi_version(void);
NTAN_API const char* ntan_version_string(void);
NTAN_API const char* ntan_status_name(ntan_status status);
NTAN_API const char* ntan_kind_name(ntan_kind kind);
/* Message of the last failed call on this thread; "" after a success. */
NTAN_API const char* ntan_last_error(void);
NTAN_API void ntan_string_free(char* s);

/* Connections.  Table keys are 1-based "l,mu,nu"; omitted symbols are zero. */
NTAN_API ntan_status ntan_connection_flat(int m, ntan_connection** out);
NTAN_API ntan_status ntan_connection_from_table(int m, const char* const* keys, const char* const* exprs,
                                                size_t count, ntan_connection** out);
/* Levi-Civita connection of the row-major m x m metric. */
NTAN_API ntan_status ntan_connection_from_metric(int m, const char* const* metric, ntan_connection** out);
NTAN_API ntan_status ntan_connection_symmetrized(const ntan_connection* c, ntan_connection** out);
NTAN_API void ntan_connection_free(ntan_connection* c);
NTAN_API int ntan_connection_dimension(const ntan_connection* c);
/* out receives m^3 values, Gamma^l_{mu nu} at (l * m + mu) * m + nu. */
NTAN_API ntan_status ntan_connection_christoffel(const ntan_connection* c, const double* x, double* out);

/* Curves on [t_lo, t_hi]; a directed curve adds frame u and factor c with c u = gamma'. */
NTAN_API ntan_status ntan_curve_create(int m, const char* const* components, double t_lo, double t_hi,
                                       ntan_curve** out);
NTAN_API ntan_status ntan_curve_create_directed(int m, const char* const* components, const char* const* frame,
                                                const char* factor, double t_lo, double t_hi, ntan_curve** out);
NTAN_API void ntan_curve_free(ntan_curve* curve);

/* Position and velocity after geodesic time s from (x, v); either output may be NULL. */
NTAN_API ntan_status ntan_geodesic(const ntan_connection* c, const double* x, const double* v, double s,
                                   double* position, double* velocity);

/* Columns nabla gamma .. nabla^k gamma at t, column-major m x k. */
NTAN_API ntan_status ntan_covariant_tower(const ntan_connection* c, const ntan_curve* curve, double t, int k,
                                          double* out);

typedef struct ntan_class_result {
  ntan_kind kind;
  int dimension;
  int type[NTAN_MAX_DIMENSION];
  int type_length; /* < dimension when the type was not reached */
  double tolerance;
  char reason[256]; /* set for NTAN_UNRESOLVED */
} ntan_class_result;

/* tol <= 0 selects 1e-8.  `diagnostics` enables the two-to-one test. */
NTAN_API ntan_status ntan_classify(const ntan_connection* c, const ntan_curve* curve, double t0, double tol,
                                   int diagnostics, ntan_class_result* out);
NTAN_API ntan_status ntan_classify_via_psi(const ntan_connection* c, const ntan_curve* curve, double t0, double tol,
                                           ntan_class_result* out);
/* Nonzero when the curve is torsionless on n_probe points of [t_lo, t_hi]. */
NTAN_API ntan_status ntan_torsionless(const ntan_connection* c, const ntan_curve* curve, double t_lo, double t_hi,
                                      int n_probe, double tol, int* out);

NTAN_API ntan_status ntan_surface_create(const ntan_connection* c, const ntan_curve* curve, ntan_surface** out);
NTAN_API void ntan_surface_free(ntan_surface* surface);
NTAN_API ntan_status ntan_surface_evaluate(const ntan_surface* surface, double t, double s, double* out);

/* Batch runs.  Reports are JSON ("json") or CSV ("csv"); exit_code follows
 * the command line convention: 0 ok, 1 when a verify check failed, 2 when a
 * record or trial sample is unresolved. */
typedef struct ntan_run_options {
  double tol; /* <= 0: from the problem file, else 1e-8 */
  double window; /* <= 0: from the problem file, else 1 */
  unsigned threads; /* 0: hardware concurrency */
  int margin_check;
  const char* format; /* NULL means "json" */
  const char* out_dir; /* mesh output; NULL means "." */
} ntan_run_options;

NTAN_API void ntan_run_options_init(ntan_run_options* options);
NTAN_API ntan_status ntan_run_classify(const char* problem_path, const ntan_run_options* options, char** report,
                                       int* exit_code);
NTAN_API ntan_status ntan_run_scan(const char* problem_path, const ntan_run_options* options, char** report,
                                   int* exit_code);
NTAN_API ntan_status ntan_run_mesh(const char* problem_path, const ntan_run_options* options, char** report,
                                   int* exit_code);

typedef struct ntan_trial_options {
  int m;
  int curves;
  int points;
  int degree; /* 0: m + 1 */
  uint64_t seed;
  double tol;
  int directed;
  int ell;
  unsigned threads;
} ntan_trial_options;

NTAN_API void ntan_trial_options_init(ntan_trial_options* options);
NTAN_API ntan_status ntan_run_trial(const ntan_trial_options* options, const char* format, char** report,
                                    int* exit_code);
NTAN_API ntan_status ntan_run_verify(double tol, const char* format, char** report, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
