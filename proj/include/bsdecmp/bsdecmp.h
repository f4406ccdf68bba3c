// Copyright 2026 The bsdecmp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef BSDECMP_BSDECMP_H_
#define BSDECMP_BSDECMP_H_

/* C interface to bsdecmp. Objects are opaque handles released with the
 * matching *_free function. Every fallible call returns a bsdecmp_status;
 * on failure bsdecmp_last_error() describes the problem for the calling
 * thread until its next call into the library.
 *
 * Matrices are passed row-major: z[i * d + j] is entry (i, j) of the n x d
 * matrix. Component and direction indices are one-based. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BSDECMP_BUILDING_LIBRARY)
#define BSDECMP_API __declspec(dllexport)
#else
#define BSDECMP_API __declspec(dllimport)
#endif
#elif defined(BSDECMP_BUILDING_LIBRARY)
#define BSDECMP_API __attribute__((visibility("default")))
#else
#define BSDECMP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsdecmp_status {
  BSDECMP_OK = 0,
  BSDECMP_ERR_ZERO_VECTOR = 1,
  BSDECMP_ERR_DIMENSION_MISMATCH = 2,
  BSDECMP_ERR_ON_BOUNDARY = 3,
  BSDECMP_ERR_SINGULAR_SYSTEM = 4,
  BSDECMP_ERR_SYNTAX = 5,
  BSDECMP_ERR_UNKNOWN_VARIABLE = 6,
  BSDECMP_ERR_INDEX_OUT_OF_RANGE = 7,
  BSDECMP_ERR_NON_FINITE = 8,
  BSDECMP_ERR_UNKNOWN_BUILTIN = 9,
  BSDECMP_ERR_BAD_ARGS = 10,
  BSDECMP_ERR_NOT_DETERMINISTIC = 11,
  BSDECMP_ERR_TOO_LARGE = 12,
  BSDECMP_ERR_PICARD_DIVERGED = 13,
  BSDECMP_ERR_ILL_CONDITIONED = 14,
  BSDECMP_ERR_TERMINAL_NOT_IN_K = 15,
  BSDECMP_ERR_CONFIG = 16,
  BSDECMP_ERR_IO = 17,
  BSDECMP_ERR_INTERNAL = 99
} bsdecmp_status;

typedef struct bsdecmp_direction bsdecmp_direction;
typedef struct bsdecmp_generator bsdecmp_generator;
typedef struct bsdecmp_terminal bsdecmp_terminal;
typedef struct bsdecmp_report bsdecmp_report;

BSDECMP_API const char* bsdecmp_version(void);
BSDECMP_API const char* bsdecmp_status_name(bsdecmp_status status);
/* Message of the last failed call on this thread, "" if none. */
BSDECMP_API const char* bsdecmp_last_error(void);
/* Character offset for BSDECMP_ERR_SYNTAX-class failures, otherwise -1. */
BSDECMP_API long bsdecmp_last_error_position(void);

/* --- order directions ---------------------------------------------------- */

BSDECMP_API bsdecmp_status bsdecmp_direction_create(const double* q, size_t n, bsdecmp_direction** out);
BSDECMP_API bsdecmp_status bsdecmp_direction_uniform(size_t n, bsdecmp_direction** out);
BSDECMP_API bsdecmp_status bsdecmp_direction_unit(size_t n, size_t i, bsdecmp_direction** out);
BSDECMP_API void bsdecmp_direction_free(bsdecmp_direction* q);
BSDECMP_API size_t bsdecmp_direction_dim(const bsdecmp_direction* q);
/* Copies the normalized vector into q_out[0..n). */
BSDECMP_API bsdecmp_status bsdecmp_direction_get(const bsdecmp_direction* q, double* q_out, size_t n);
/* Projection onto {y : <y, q> >= 0} and the distance to it. */
BSDECMP_API bsdecmp_status bsdecmp_project(const bsdecmp_direction* q, const double* y, size_t n,
                                           double* proj_out, double* dist_out);

/* --- generators and terminal values -------------------------------------- */

/* mu may be NULL to estimate the Lipschitz constant by sampling. */
BSDECMP_API bsdecmp_status bsdecmp_generator_parse(size_t n, size_t d, const char* const* expressions,
                                                   const double* mu, bsdecmp_generator** out);
BSDECMP_API bsdecmp_status bsdecmp_generator_builtin(const char* name, bsdecmp_generator** out);
BSDECMP_API void bsdecmp_generator_free(bsdecmp_generator* g);
BSDECMP_API bsdecmp_status bsdecmp_generator_info(const bsdecmp_generator* g, size_t* n, size_t* d, double* mu);
BSDECMP_API bsdecmp_status bsdecmp_generator_eval(const bsdecmp_generator* g, double t, const double* y,
                                                  const double* z, double* out);

BSDECMP_API bsdecmp_status bsdecmp_terminal_parse(size_t n, size_t d, const char* const* expressions,
                                                  bsdecmp_terminal** out);
BSDECMP_API bsdecmp_status bsdecmp_terminal_builtin(const char* name, bsdecmp_terminal** out);
BSDECMP_API void bsdecmp_terminal_free(bsdecmp_terminal* xi);
BSDECMP_API bsdecmp_status bsdecmp_terminal_eval(const bsdecmp_terminal* xi, const double* w, double* out);

/* --- numerics -------------------------------------------------------------- */

/* Smallest C for which the two-generator inequality holds at one point. */
BSDECMP_API bsdecmp_status bsdecmp_c_required(const bsdecmp_generator* g1, const bsdecmp_generator* g2,
                                              const bsdecmp_direction* q, double t, const double* y,
                                              const double* y_prime, const double* z, const double* z_prime,
                                              double* out);

/* Y at t = 0 (first node or path). scheme is "ode", "tree" or "lsmc". */
BSDECMP_API bsdecmp_status bsdecmp_solve_y0(const bsdecmp_generator* g, const bsdecmp_terminal* xi, double horizon,
                                            const char* scheme, size_t steps, size_t paths, uint64_t seed,
                                            double* y0_out);

/* --- scenarios and reports ------------------------------------------------- */

/* Fields left at their zero value (NULL, 0) do not override the config. */
typedef struct bsdecmp_overrides {
  const char* command;
  int has_seed;
  uint64_t seed;
  const char* scheme;
  size_t steps;
  size_t paths;
} bsdecmp_overrides;

BSDECMP_API bsdecmp_status bsdecmp_run_scenario_json(const char* config_json, const bsdecmp_overrides* overrides,
                                                     bsdecmp_report** out);
BSDECMP_API bsdecmp_status bsdecmp_run_scenario_file(const char* path, const bsdecmp_overrides* overrides,
                                                     bsdecmp_report** out);
BSDECMP_API bsdecmp_status bsdecmp_reproduce_examples(uint64_t seed, bsdecmp_report** out);

/* 0 when every asserted property holds, 1 otherwise. */
BSDECMP_API int bsdecmp_report_exit_code(const bsdecmp_report* r);
/* Full report as JSON, timing included. Owned by the report. */
BSDECMP_API const char* bsdecmp_report_json(const bsdecmp_report* r);
/* Short human-readable summary. Owned by the report. */
BSDECMP_API const char* bsdecmp_report_summary(const bsdecmp_report* r);
BSDECMP_API bsdecmp_status bsdecmp_report_write(const bsdecmp_report* r, const char* dir);
BSDECMP_API void bsdecmp_report_free(bsdecmp_report* r);

#ifdef __cplusplus
}
#endif

#endif /* BSDECMP_BSDECMP_H_ */
