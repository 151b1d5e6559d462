/* C interface to the IMPES two-phase flow simulator.
 *
 * Every function returns an impes_status; on failure a message describing
 * the error is available from impes_last_error() on the calling thread.
 * Handles are opaque and must be released with the matching *_free call.
 */
#ifndef IMPES_IMPES_H
#define IMPES_IMPES_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(IMPES_BUILDING_LIBRARY)
#    define IMPES_API __declspec(dllexport)
#  else
#    define IMPES_API __declspec(dllimport)
#  endif
#else
#  define IMPES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum impes_status {
  IMPES_OK = 0,
  IMPES_ERR_INVALID_ARGUMENT = 1,
  IMPES_ERR_RESOLUTION = 2,     /* interface too complex for the mesh */
  IMPES_ERR_DEGENERATE_CUT = 3, /* singular immersed basis system */
  IMPES_ERR_SOLVER = 4,         /* linear solver did not converge */
  IMPES_ERR_CONTRACT = 5,
  IMPES_ERR_IO = 6,
  IMPES_ERR_INTERNAL = 7
} impes_status;

IMPES_API const char* impes_last_error(void);
IMPES_API const char* impes_version(void);

/* Receives one structured log line per time step (no trailing newline). */
typedef void (*impes_log_fn)(const char* line, void* user);

typedef struct impes_run_options {
  int workers;          /* threads for assembly and flux stages, >= 1 */
  double pressure_tol;  /* relative residual for the pressure solve */
  int direct_solver;    /* nonzero: sparse Cholesky, else Jacobi-preconditioned CG */
  int lumped_mass;      /* nonzero: row-sum lumped dual mass matrix */
  double dt;            /* <= 0: default time step of the case */
  double final_time;    /* <= 0: final time of the case (studies only) */
  int log_stride;       /* log every k-th step when a log callback is set; 0 disables */
  impes_log_fn log;
  void* log_user;
} impes_run_options;

IMPES_API void impes_run_options_init(impes_run_options* options);

/* ---- convergence studies on the manufactured cases ---- */

typedef struct impes_study impes_study;

typedef enum impes_column {
  IMPES_COL_S_L2 = 0,
  IMPES_COL_P_L2 = 1,
  IMPES_COL_U_L2 = 2,
  IMPES_COL_S_H1 = 3,
  IMPES_COL_P_H1 = 4
} impes_column;

typedef struct impes_error_row {
  int n;
  double errors[5];          /* indexed by impes_column */
  double orders[5];          /* NaN on the first row */
  double max_flux_mismatch;
  double max_balance_error;
  double seconds;
} impes_error_row;

typedef struct impes_check {
  char name[96];
  double value;
  double threshold;
  int at_least; /* 1: value >= threshold required, 0: value <= threshold */
  int passed;
} impes_check;

/* case_id: "ex1", "ex2", "ex3a" or "ex3b". meshes must double each time. */
IMPES_API impes_status impes_study_run(const char* case_id, const int* meshes, size_t count,
                                       const impes_run_options* options, impes_study** out);
IMPES_API size_t impes_study_rows(const impes_study* study);
IMPES_API impes_status impes_study_row(const impes_study* study, size_t index,
                                       impes_error_row* out);
IMPES_API impes_status impes_study_average_order(const impes_study* study, impes_column column,
                                                 double* out);
IMPES_API impes_status impes_study_write_csv(const impes_study* study, const char* path);
IMPES_API size_t impes_study_checks(const impes_study* study);
IMPES_API impes_status impes_study_check(const impes_study* study, size_t index,
                                         impes_check* out);
IMPES_API void impes_study_free(impes_study* study);

/* ---- quarter five-spot waterflood ---- */

typedef struct impes_fivespot impes_fivespot;

typedef struct impes_fivespot_options {
  int n;                 /* elements per side */
  double inject_rate;    /* m^2/day */
  double end_days;
  double dt_days;        /* <= 0: h^2/240 day */
  double entry_pressure; /* Pa, 0 disables capillarity */
} impes_fivespot_options;

typedef struct impes_fivespot_stats {
  int level;
  double days;
  double s_min;           /* over the current field */
  double s_max;
  double run_s_min;       /* over all steps so far */
  double run_s_max;
  double mass;            /* porosity * integral of S, m^2 */
  double net_injected;    /* cumulative wetting source, m^2 */
  double max_mass_defect; /* worst per-step |mass change - net source| / |net source| */
  double disk_mean;       /* mean S inside the low-permeability disk */
  double annulus_mean;    /* mean S in the 25 m ring around it */
  double max_courant;
} impes_fivespot_stats;

IMPES_API void impes_fivespot_options_init(impes_fivespot_options* options);
IMPES_API impes_status impes_fivespot_create(const impes_fivespot_options* options,
                                             const impes_run_options* run,
                                             impes_fivespot** out);
IMPES_API double impes_fivespot_time_step_days(const impes_fivespot* sim);
/* Steps until the time reaches `days` (never past the configured end). */
IMPES_API impes_status impes_fivespot_advance_to(impes_fivespot* sim, double days);
IMPES_API impes_status impes_fivespot_stats_get(const impes_fivespot* sim,
                                                impes_fivespot_stats* out);
/* Copies the (n+1)^2 nodal saturations, row-major from the origin. */
IMPES_API impes_status impes_fivespot_saturation(const impes_fivespot* sim, double* out,
                                                 size_t len);
IMPES_API impes_status impes_fivespot_write_vtk(const impes_fivespot* sim, const char* path);
IMPES_API impes_status impes_fivespot_write_csv(const impes_fivespot* sim, const char* path);
IMPES_API void impes_fivespot_free(impes_fivespot* sim);

#ifdef __cplusplus
}
#endif

#endif /* IMPES_IMPES_H */
