/*
 * Copyright 2026 The ksk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * ksk: count sketch Kaczmarz and greedy Kaczmarz solvers, C interface.
 *
 * Objects are opaque handles created by ksk_*_create / ksk_*_load and
 * released with the matching ksk_*_destroy. Every fallible call returns a
 * ksk_status; on failure ksk_last_error() describes the problem. The message
 * is thread local and stays valid until the next failing call on the same
 * thread. Strings returned through char** are owned by the caller and must be
 * released with ksk_string_free.
 */

#ifndef KSK_KSK_H_
#define KSK_KSK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KSK_BUILDING_LIBRARY)
#    define KSK_API __declspec(dllexport)
#  else
#    define KSK_API __declspec(dllimport)
#  endif
#else
#  define KSK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ksk_status {
  KSK_OK = 0,
  KSK_ERR_INVALID_ARGUMENT = 1,
  KSK_ERR_DIMENSION = 2,
  KSK_ERR_IO = 3,
  KSK_ERR_RANK_DEFICIENT = 4,
  KSK_ERR_NO_CONVERGENCE = 5,
  KSK_ERR_INTERNAL = 6
} ksk_status;

typedef enum ksk_method {
  KSK_METHOD_RK = 0,
  KSK_METHOD_GRK = 1,
  KSK_METHOD_RGRK = 2,
  KSK_METHOD_MWRK = 3,
  KSK_METHOD_CSK = 4
} ksk_method;

typedef enum ksk_termination {
  KSK_CONVERGED = 0,
  KSK_MAX_ITERS = 1,
  KSK_STAGNATED = 2
} ksk_termination;

typedef enum ksk_format {
  KSK_FORMAT_BINARY = 0,        /* "KSKM" header, little-endian doubles */
  KSK_FORMAT_MATRIX_MARKET = 1  /* %%MatrixMarket matrix array real general */
} ksk_format;

typedef struct ksk_matrix ksk_matrix;
typedef struct ksk_sketch ksk_sketch;
typedef struct ksk_report ksk_report;

KSK_API const char* ksk_version(void);
KSK_API const char* ksk_last_error(void);
KSK_API const char* ksk_status_string(ksk_status status);
KSK_API void ksk_string_free(char* s);

/* ---- matrices (vectors are n x 1 matrices) ---------------------------- */

/* Copies rows*cols row-major values; data may be NULL for zeros. */
KSK_API ksk_status ksk_matrix_create(size_t rows, size_t cols,
                                     const double* data, ksk_matrix** out);
KSK_API void ksk_matrix_destroy(ksk_matrix* m);
KSK_API size_t ksk_matrix_rows(const ksk_matrix* m);
KSK_API size_t ksk_matrix_cols(const ksk_matrix* m);
/* Row-major view, valid while m lives. */
KSK_API const double* ksk_matrix_data(const ksk_matrix* m);
/* Detects the format from the file contents. */
KSK_API ksk_status ksk_matrix_load(const char* path, ksk_matrix** out);
KSK_API ksk_status ksk_matrix_save(const ksk_matrix* m, const char* path,
                                   ksk_format format);
/* out = a * x, where x is a cols x 1 matrix. */
KSK_API ksk_status ksk_matrix_matvec(const ksk_matrix* a, const ksk_matrix* x,
                                     ksk_matrix** out);

/* Gaussian consistent system: a (m x n), x_star (n x 1), b = a x_star. */
KSK_API ksk_status ksk_generate_problem(size_t m, size_t n, uint64_t seed,
                                        ksk_matrix** a, ksk_matrix** b,
                                        ksk_matrix** x_star);

/* ---- spectra and convergence factors --------------------------------- */

typedef struct ksk_spectral_summary {
  double sigma_max;
  double sigma_min_nonzero;
  double frobenius_sq;
  size_t rank_estimate;
  double tolerance_used;
} ksk_spectral_summary;

/* rank_tol <= 0 selects the default 1e-10. */
KSK_API ksk_status ksk_spectral_summary_compute(const ksk_matrix* m,
                                                double rank_tol,
                                                ksk_spectral_summary* out);
KSK_API ksk_status ksk_spectral_norm(const ksk_matrix* m, double tol,
                                     size_t max_iters, double* out);
KSK_API ksk_status ksk_convergence_factor_csk(const ksk_spectral_summary* s,
                                              size_t n, double epsilon,
                                              double* out);
KSK_API ksk_status ksk_convergence_factor_mwrk(const ksk_matrix* a,
                                               const ksk_spectral_summary* s,
                                               double* out);

/* ---- count sketch ----------------------------------------------------- */

typedef struct ksk_distortion {
  double epsilon_exact;
  double sigma_min_SQ;
  double sigma_max_SQ;
  size_t d;
  size_t n;
} ksk_distortion;

KSK_API ksk_status ksk_sketch_create(size_t d, size_t m, uint64_t seed,
                                     ksk_sketch** out);
KSK_API ksk_status ksk_sketch_from_json(const char* json, ksk_sketch** out);
KSK_API void ksk_sketch_destroy(ksk_sketch* s);
KSK_API ksk_status ksk_sketch_to_json(const ksk_sketch* s, int explicit_arrays,
                                      char** out);
/* Works for matrices and for vectors stored as m x 1 matrices. */
KSK_API ksk_status ksk_sketch_apply(const ksk_sketch* s, const ksk_matrix* a,
                                    ksk_matrix** out);
KSK_API ksk_status ksk_sketch_distortion(const ksk_sketch* s,
                                         const ksk_matrix* a,
                                         ksk_distortion* out);

/* ---- solving ---------------------------------------------------------- */

typedef struct ksk_solver_config {
  ksk_method method;
  double tol_res;          /* default 1e-6 */
  size_t max_iters;        /* default 20000 */
  uint64_t seed;
  double theta;            /* RGRK only, default 0.5 */
  size_t d;                /* CSK only, 0 selects n^2 */
  size_t trace_every;      /* default 1 */
  size_t recompute_every;  /* default 1000 */
  int compute_epsilon;     /* CSK: also measure the sketch distortion */
} ksk_solver_config;

KSK_API void ksk_solver_config_init(ksk_solver_config* cfg);
KSK_API ksk_status ksk_method_parse(const char* name, ksk_method* out);
KSK_API const char* ksk_method_name(ksk_method method);

/* x0 and x_star may be NULL. With x_star the stopping quantity is the
 * relative solution error, otherwise the relative residual. */
KSK_API ksk_status ksk_solve(const ksk_matrix* a, const ksk_matrix* b,
                             const ksk_matrix* x0, const ksk_matrix* x_star,
                             const ksk_solver_config* cfg, ksk_report** out);
KSK_API void ksk_report_destroy(ksk_report* r);
KSK_API ksk_termination ksk_report_termination(const ksk_report* r);
KSK_API size_t ksk_report_iterations(const ksk_report* r);
KSK_API double ksk_report_final_res(const ksk_report* r);
KSK_API double ksk_report_wall_time(const ksk_report* r);
/* Final iterate as an n x 1 matrix. */
KSK_API ksk_status ksk_report_solution(const ksk_report* r, ksk_matrix** out);
KSK_API ksk_status ksk_report_to_json(const ksk_report* r, char** out);

/* ---- benchmarking ----------------------------------------------------- */

enum {
  KSK_BENCH_TABLE = 1,
  KSK_BENCH_TRACES = 2,
  KSK_BENCH_ARCHIVE = 4,
  KSK_BENCH_ALL = 7
};

typedef struct ksk_bench_config {
  const size_t* sizes_m;   /* num_sizes entries */
  const size_t* sizes_n;
  size_t num_sizes;
  const ksk_method* methods;  /* NULL: rk, grk, mwrk, csk */
  size_t num_methods;
  size_t trials;           /* default 50 */
  double tol_res;          /* default 1e-6 */
  size_t max_iters;        /* default 20000 */
  size_t d;                /* 0: n^2 */
  uint64_t base_seed;
  int measure_epsilon;
  double delta_report;     /* default 0.1 */
  size_t trace_every;      /* default 1 */
  size_t threads;          /* default 1 */
  int no_timing;
  unsigned outputs;        /* KSK_BENCH_* bits, default KSK_BENCH_ALL */
} ksk_bench_config;

typedef struct ksk_bench_summary {
  size_t rows;             /* lines in table.csv after the header */
  size_t flagged_trials;   /* solves that stopped without converging */
  size_t failed_cells;     /* (size, method) cells that raised errors */
} ksk_bench_summary;

KSK_API void ksk_bench_config_init(ksk_bench_config* cfg);

/* Runs the suite and writes the selected outputs under out_dir. Failed cells
 * are not an error: they are counted in the summary and their messages can
 * be read with ksk_bench_failure until the next ksk_bench_run on the same
 * thread. */
KSK_API ksk_status ksk_bench_run(const ksk_bench_config* cfg,
                                 const char* out_dir, ksk_bench_summary* out);
KSK_API const char* ksk_bench_failure(size_t index);
/* Empirical (1 - delta_report) epsilon quantile of size index i from the
 * last run with measure_epsilon; returns KSK_ERR_INVALID_ARGUMENT when none
 * was recorded for that size. */
KSK_API ksk_status ksk_bench_epsilon_quantile(size_t size_index, double* out,
                                              size_t* samples);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* KSK_KSK_H_ */
