/* SPDX-License-Identifier: Apache-2.0 */
#ifndef TRISCC_CLARABEL_FFI_H
#define TRISCC_CLARABEL_FFI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  TRISCC_CONE_ZERO = 0,
  TRISCC_CONE_NONNEG = 1,
  TRISCC_CONE_SOC = 2,
  TRISCC_CONE_PSD_TRIANGLE = 3,
  TRISCC_CONE_EXP = 4,
  TRISCC_CONE_POW3 = 5,
};

typedef struct {
  int32_t kind;
  int64_t dim; /* zero/nonneg/soc: row count; psd: matrix side n; exp/pow: 3 */
  double alpha;
} triscc_cone_spec;

typedef struct {
  double tol_gap_abs;
  double tol_gap_rel;
  double tol_feas;
  int64_t max_iter;
  int32_t verbose;
  double time_limit; /* seconds, <=0 means unlimited */
  int32_t equilibrate;
  double static_reg;
  int32_t use_faer;
} triscc_solver_opts;

/* status codes: 0 solved, 1 almost solved, 2 primal infeasible, 3 dual
 * infeasible, 4/5 almost infeasible, 6 max iters, 7 time limit,
 * 8 numerical error, 9 insufficient progress, 10 other */
int32_t triscc_clarabel_solve(
    int64_t n, int64_t m, const double* q, const int64_t* a_colptr,
    const int64_t* a_rowidx, const double* a_vals, const double* b,
    const triscc_cone_spec* cones, int64_t n_cones,
    const triscc_solver_opts* opts, double* x_out, double* obj_out,
    int32_t* status_out, int32_t* iters_out, double* solve_time_out);

#ifdef __cplusplus
}
#endif

#endif
