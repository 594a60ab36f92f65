#ifndef SPECLAT_SPECLAT_H
#define SPECLAT_SPECLAT_H

#include <stddef.h>

#if defined(_WIN32)
#define SPECLAT_API __declspec(dllexport)
#else
#define SPECLAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum speclat_status {
  SPECLAT_OK = 0,
  SPECLAT_ERR_INVALID_ARGUMENT = 1,
  SPECLAT_ERR_PARSE = 2,
  SPECLAT_ERR_FORMULA = 3,
  SPECLAT_ERR_MODEL = 4,
  SPECLAT_ERR_STATE_LIMIT = 5,
  SPECLAT_ERR_FILTER = 6,
  SPECLAT_ERR_MONOTONICITY = 7,
  SPECLAT_ERR_ORACLE_GUARD = 8,
  SPECLAT_ERR_ORACLE_MISMATCH = 9,
  SPECLAT_ERR_CONFIG = 10,
  SPECLAT_ERR_IO = 11,
  SPECLAT_ERR_INTERNAL = 99
} speclat_status;

typedef struct speclat_plan speclat_plan;
typedef struct speclat_sweep speclat_sweep;

typedef enum speclat_mode { SPECLAT_MODE_EXHAUSTIVE = 0, SPECLAT_MODE_ADAPTIVE = 1 } speclat_mode;

SPECLAT_API const char* speclat_version(void);

/* Message of the last failed call on this thread; empty string if none. */
SPECLAT_API const char* speclat_last_error(void);
SPECLAT_API const char* speclat_status_name(speclat_status status);

/* Plans. A plan starts from the built-in energy sweep; a config file
   overrides it key by key. */
SPECLAT_API speclat_status speclat_plan_default(speclat_plan** out);
SPECLAT_API speclat_status speclat_plan_load(const char* path, speclat_plan** out);
SPECLAT_API speclat_status speclat_plan_parse(const char* text, speclat_plan** out);
SPECLAT_API speclat_status speclat_plan_set_mode(speclat_plan* plan, speclat_mode mode);
SPECLAT_API speclat_status speclat_plan_set_rho(speclat_plan* plan, const double* rho, size_t count);
SPECLAT_API speclat_status speclat_plan_set_threads(speclat_plan* plan, unsigned threads);
SPECLAT_API size_t speclat_plan_num_values(const speclat_plan* plan);
SPECLAT_API size_t speclat_plan_num_points(const speclat_plan* plan);
SPECLAT_API void speclat_plan_free(speclat_plan* plan);

/* Brute-force comparison on small grids. SPECLAT_ERR_ORACLE_MISMATCH if any
   state disagrees; comparisons and max_abs_diff may be NULL. */
SPECLAT_API speclat_status speclat_oracle_check(const speclat_plan* plan, size_t* comparisons,
                                                double* max_abs_diff);

/* Single check: velocity bound vmax, service-time bound tmax, for the swept
   value at value_index. */
SPECLAT_API speclat_status speclat_check_point(const speclat_plan* plan, size_t value_index, int vmax,
                                               int tmax, double* probability, size_t* states);

SPECLAT_API speclat_status speclat_sweep_run(const speclat_plan* plan, speclat_sweep** out);
SPECLAT_API speclat_status speclat_sweep_write(const speclat_sweep* sweep, const char* out_dir,
                                               int with_timestamp);
SPECLAT_API size_t speclat_sweep_checker_calls(const speclat_sweep* sweep);
SPECLAT_API size_t speclat_sweep_audit_violations(const speclat_sweep* sweep);
/* Probability at lattice indices (1-based) for a swept value; status
   SPECLAT_ERR_INVALID_ARGUMENT if the point was not evaluated. */
SPECLAT_API speclat_status speclat_sweep_probability(const speclat_sweep* sweep, size_t value_index, int i,
                                                     int j, double* probability);
SPECLAT_API void speclat_sweep_free(speclat_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif
