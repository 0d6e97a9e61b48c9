/* Copyright nepkit contributors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NEPKIT_NEPKIT_H
#define NEPKIT_NEPKIT_H

#include <stdint.h>

#if defined(_WIN32)
#define NEPKIT_API __declspec(dllexport)
#else
#define NEPKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C"
{
#endif

  /*
   * Status codes. Every fallible call returns one of these; the message of
   * the most recent failure on the calling thread is available from
   * nepkit_last_error().
   */
  typedef enum nepkit_status
  {
    NEPKIT_OK = 0,
    NEPKIT_E_INVALID_ARGUMENT = 1,
    NEPKIT_E_IO = 2,
    NEPKIT_E_PARSE = 3,
    NEPKIT_E_BREAKDOWN = 4,
    NEPKIT_E_RANK_DEFICIENT = 5,
    NEPKIT_E_SINGULAR = 6,
    NEPKIT_E_POLE_HIT = 7,
    NEPKIT_E_DOMAIN = 8,
    NEPKIT_E_NOT_CONVERGED = 9,
    NEPKIT_E_INTERNAL = 99
  } nepkit_status;

  typedef struct nepkit_problem nepkit_problem;
  typedef struct nepkit_config nepkit_config;
  typedef struct nepkit_report nepkit_report;

  NEPKIT_API const char *nepkit_version(void);
  NEPKIT_API const char *nepkit_status_name(nepkit_status status);
  NEPKIT_API const char *nepkit_last_error(void);

  /* Problems. */
  NEPKIT_API nepkit_status nepkit_problem_builtin(const char *name, nepkit_problem **out);
  NEPKIT_API nepkit_status nepkit_problem_load_manifest(const char *path, nepkit_problem **out);
  NEPKIT_API nepkit_status nepkit_problem_export_manifest(const nepkit_problem *problem,
                                                          const char *dir, const char *stem);
  NEPKIT_API nepkit_status nepkit_problem_info(const nepkit_problem *problem, int *dim,
                                               int *num_terms);
  NEPKIT_API void nepkit_problem_free(nepkit_problem *problem);

  /* Number of built-in problems and the name of the i-th one. */
  NEPKIT_API int nepkit_builtin_count(void);
  NEPKIT_API const char *nepkit_builtin_name(int i);

  /* Run configuration; unset fields keep their defaults. */
  NEPKIT_API nepkit_status nepkit_config_create(nepkit_config **out);
  NEPKIT_API void nepkit_config_free(nepkit_config *config);
  NEPKIT_API nepkit_status nepkit_config_set_region(nepkit_config *config, double center_re,
                                                    double center_im, double radius,
                                                    int upper_half);
  NEPKIT_API nepkit_status nepkit_config_set_nodes(nepkit_config *config, int nodes);
  NEPKIT_API nepkit_status nepkit_config_set_tol(nepkit_config *config, double tol);
  NEPKIT_API nepkit_status nepkit_config_set_max_degree(nepkit_config *config, int max_degree);
  /* "auto", "dense" or "filter". */
  NEPKIT_API nepkit_status nepkit_config_set_solver(nepkit_config *config, const char *solver);
  NEPKIT_API nepkit_status nepkit_config_set_filter_order(nepkit_config *config, int order);
  NEPKIT_API nepkit_status nepkit_config_set_subspace(nepkit_config *config, int columns);
  NEPKIT_API nepkit_status nepkit_config_set_shift(nepkit_config *config, double re, double im);
  NEPKIT_API nepkit_status nepkit_config_set_thresholds(nepkit_config *config, double tau_r,
                                                        double tau_g);
  NEPKIT_API nepkit_status nepkit_config_set_filter_iters(nepkit_config *config, int max_iters);
  NEPKIT_API nepkit_status nepkit_config_set_seed(nepkit_config *config, uint64_t seed);
  /* Writes <stem>_C0.mtx and <stem>_C1.mtx during the run. */
  NEPKIT_API nepkit_status nepkit_config_set_pencil_export(nepkit_config *config,
                                                           const char *stem);

  /* Full pipeline: fit, linearize, solve, check. */
  NEPKIT_API nepkit_status nepkit_run(const nepkit_problem *problem, const nepkit_config *config,
                                      nepkit_report **out);
  NEPKIT_API void nepkit_report_free(nepkit_report *report);

  /* 1 when the fit met the tolerance and the solver converged. */
  NEPKIT_API nepkit_status nepkit_report_success(const nepkit_report *report, int *success);
  NEPKIT_API nepkit_status nepkit_report_summary(const nepkit_report *report, int *degree,
                                                 double *sqrt_e, double *gap, double *bound,
                                                 int *pole_free);
  NEPKIT_API nepkit_status nepkit_report_eigen_count(const nepkit_report *report, int *count,
                                                     int *in_region);
  NEPKIT_API nepkit_status nepkit_report_eigenpair(const nepkit_report *report, int i,
                                                   double *re, double *im, double *residual,
                                                   double *normalized_residual, int *in_region);
  /* format is "json" or "csv"; path NULL or "-" writes to standard output. */
  NEPKIT_API nepkit_status nepkit_report_write(const nepkit_report *report, const char *path,
                                               const char *format);
  NEPKIT_API nepkit_status nepkit_report_write_lawson_trace(const nepkit_report *report,
                                                            const char *path);
  NEPKIT_API nepkit_status nepkit_report_write_filter_trace(const nepkit_report *report,
                                                            const char *path);

#ifdef __cplusplus
}
#endif

#endif /* NEPKIT_NEPKIT_H */
