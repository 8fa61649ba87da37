// Copyright 2026 The biphoton Authors
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

/* Plain C interface to the biphoton library. All objects are opaque handles
 * owned by the caller and released with the matching *_free function. Every
 * fallible call returns a bp_status; on failure bp_last_error() describes the
 * problem for the calling thread. Strings returned by the library stay valid
 * until the owning handle is freed (or forever for static strings). */

#ifndef BIPHOTON_H
#define BIPHOTON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BIPHOTON_BUILDING)
#define BP_API __declspec(dllexport)
#else
#define BP_API __declspec(dllimport)
#endif
#else
#define BP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bp_status {
    BP_OK = 0,
    BP_ERR_INVALID = 1, /* bad argument or precondition */
    BP_ERR_CONFIG = 2,  /* config syntax or validation */
    BP_ERR_NUMERIC = 3, /* NaN or singular numerics */
    BP_ERR_IO = 4,
    BP_ERR_INTERNAL = 5
} bp_status;

typedef struct bp_scenario bp_scenario;
typedef struct bp_run bp_run;
typedef struct bp_matrix bp_matrix;
typedef struct bp_state bp_state;

BP_API const char *bp_version(void);
/* Message of the last failed call on this thread, or "" if none. */
BP_API const char *bp_last_error(void);

/* ---- presets ---- */
BP_API size_t bp_preset_count(void);
/* NULL when index is out of range. */
BP_API const char *bp_preset_name(size_t index);
BP_API const char *bp_preset_description(size_t index);

/* ---- scenarios ---- */
BP_API bp_status bp_scenario_load(const char *path, bp_scenario **out);
BP_API bp_status bp_scenario_parse(const char *text, const char *origin, bp_scenario **out);
BP_API bp_status bp_scenario_preset(const char *name, bp_scenario **out);
BP_API bp_status bp_scenario_set_seed(bp_scenario *sc, uint64_t seed);
/* Nonzero switches to the large grid (n_full, 51 by default). */
BP_API bp_status bp_scenario_set_full(bp_scenario *sc, int full);
BP_API bp_status bp_scenario_set(bp_scenario *sc, const char *section, const char *key, const char *value);
BP_API const char *bp_scenario_experiment(const bp_scenario *sc);
/* Resolved config text; valid until the next call on the same handle. */
BP_API const char *bp_scenario_dump(bp_scenario *sc);
BP_API bp_status bp_scenario_run(const bp_scenario *sc, const char *out_dir, bp_run **out);
BP_API void bp_scenario_free(bp_scenario *sc);

BP_API const char *bp_run_dir(const bp_run *run);
BP_API size_t bp_run_file_count(const bp_run *run);
BP_API const char *bp_run_file(const bp_run *run, size_t index);
BP_API void bp_run_free(bp_run *run);

/* ---- scattering matrices on an n x n circular grid (unit pitch) ---- */
BP_API bp_status bp_matrix_identity(int n, bp_matrix **out);
/* Circulant with a random-sign DFT symbol; restores sum-encoded images exactly. */
BP_API bp_status bp_matrix_sign_solution(int n, uint64_t seed, bp_matrix **out);
BP_API bp_status bp_matrix_thin_medium(int n, double corr_len_px, uint64_t seed, bp_matrix **out);
/* Row-major interleaved (re, im) data, rows = cols = n * n. */
BP_API bp_status bp_matrix_from_data(int n, const double *re_im, bp_matrix **out);
BP_API bp_status bp_matrix_load(const char *path, int n, bp_matrix **out);
BP_API bp_status bp_matrix_save(const bp_matrix *m, const char *path, const char *tag);
BP_API bp_status bp_matrix_product(const bp_matrix *a, const bp_matrix *b, bp_matrix **out);
BP_API int bp_matrix_side(const bp_matrix *m);
BP_API void bp_matrix_free(bp_matrix *m);

/* ---- two-photon states ---- */
/* Delta-correlated sum encoding of an object given as side x side row-major
 * amplitudes in [0, 1], on an n x n circular grid. */
BP_API bp_status bp_state_sum_encoded(const double *object, int side, int n, bp_state **out);
BP_API bp_status bp_state_propagate(const bp_matrix *s, const bp_state *in, bp_state **out);
BP_API int bp_state_side(const bp_state *st);
/* Sum-coordinate image, centered, n * n values row-major. */
BP_API bp_status bp_state_gamma_plus(const bp_state *st, double *out, size_t count);
BP_API bp_status bp_state_gamma_minus(const bp_state *st, double *out, size_t count);
BP_API void bp_state_free(bp_state *st);

/* ---- analysis ---- */
/* Fits a cos(theta + theta_a) + b cos(2 theta + theta_b) + c. out receives
 * {a, theta_a, b, theta_b, c, theta_opt, rms_residual}. */
BP_API bp_status bp_fit_double_cosine(const double *theta, const double *values, size_t count, double out[7]);
/* Zero-mean normalized cross-correlation of two equally sized images. */
BP_API bp_status bp_ncc(const double *a, const double *b, int side, double *out);

#ifdef __cplusplus
}
#endif

#endif
