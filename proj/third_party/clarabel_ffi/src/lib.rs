// SPDX-License-Identifier: Apache-2.0
//! Minimal C ABI over the Clarabel conic solver.
//!
//! Solves  min q'x  s.t.  A x + s = b,  s in K  (no quadratic term),
//! where K is a product of zero / nonnegative / second-order / PSD-triangle /
//! exponential / 3-d power cones. Matrix A is given in CSC with 64-bit indices.

use clarabel::algebra::CscMatrix;
use clarabel::solver::*;
use std::slice;

pub const CONE_ZERO: i32 = 0;
pub const CONE_NONNEG: i32 = 1;
pub const CONE_SOC: i32 = 2;
pub const CONE_PSD_TRIANGLE: i32 = 3;
pub const CONE_EXP: i32 = 4;
pub const CONE_POW3: i32 = 5;

#[repr(C)]
pub struct ConeSpec {
    pub kind: i32,
    pub dim: i64,
    pub alpha: f64,
}

#[repr(C)]
pub struct SolverOpts {
    pub tol_gap_abs: f64,
    pub tol_gap_rel: f64,
    pub tol_feas: f64,
    pub max_iter: i64,
    pub verbose: i32,
    pub time_limit: f64,
    pub equilibrate: i32,
    pub static_reg: f64,
    pub use_faer: i32,
}

fn map_status(s: SolverStatus) -> i32 {
    match s {
        SolverStatus::Solved => 0,
        SolverStatus::AlmostSolved => 1,
        SolverStatus::PrimalInfeasible => 2,
        SolverStatus::DualInfeasible => 3,
        SolverStatus::AlmostPrimalInfeasible => 4,
        SolverStatus::AlmostDualInfeasible => 5,
        SolverStatus::MaxIterations => 6,
        SolverStatus::MaxTime => 7,
        SolverStatus::NumericalError => 8,
        SolverStatus::InsufficientProgress => 9,
        _ => 10,
    }
}

/// # Safety
/// All pointers must reference buffers of the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn triscc_clarabel_solve(
    n: i64,
    m: i64,
    q: *const f64,
    a_colptr: *const i64,
    a_rowidx: *const i64,
    a_vals: *const f64,
    b: *const f64,
    cones: *const ConeSpec,
    n_cones: i64,
    opts: *const SolverOpts,
    x_out: *mut f64,
    obj_out: *mut f64,
    status_out: *mut i32,
    iters_out: *mut i32,
    solve_time_out: *mut f64,
) -> i32 {
    if n < 0 || m < 0 || q.is_null() || b.is_null() || x_out.is_null() {
        return 1;
    }
    let n = n as usize;
    let m = m as usize;
    let q = slice::from_raw_parts(q, n).to_vec();
    let b = slice::from_raw_parts(b, m).to_vec();
    let colptr: Vec<usize> = slice::from_raw_parts(a_colptr, n + 1)
        .iter()
        .map(|&v| v as usize)
        .collect();
    let nnz = colptr[n];
    let rowidx: Vec<usize> = slice::from_raw_parts(a_rowidx, nnz)
        .iter()
        .map(|&v| v as usize)
        .collect();
    let vals = slice::from_raw_parts(a_vals, nnz).to_vec();
    let a = CscMatrix::new(m, n, colptr, rowidx, vals);
    let p = CscMatrix::<f64>::zeros((n, n));

    let specs = slice::from_raw_parts(cones, n_cones as usize);
    let mut k: Vec<SupportedConeT<f64>> = Vec::with_capacity(specs.len());
    for c in specs {
        let d = c.dim as usize;
        match c.kind {
            CONE_ZERO => k.push(ZeroConeT(d)),
            CONE_NONNEG => k.push(NonnegativeConeT(d)),
            CONE_SOC => k.push(SecondOrderConeT(d)),
            CONE_PSD_TRIANGLE => k.push(PSDTriangleConeT(d)),
            CONE_EXP => k.push(ExponentialConeT()),
            CONE_POW3 => k.push(PowerConeT(c.alpha)),
            _ => return 2,
        }
    }

    let o = &*opts;
    let settings = match DefaultSettingsBuilder::default()
        .verbose(o.verbose != 0)
        .max_iter(o.max_iter.max(1) as u32)
        .tol_gap_abs(o.tol_gap_abs)
        .tol_gap_rel(o.tol_gap_rel)
        .tol_feas(o.tol_feas)
        .time_limit(if o.time_limit > 0.0 {
            o.time_limit
        } else {
            f64::INFINITY
        })
        .equilibrate_enable(o.equilibrate != 0)
        .static_regularization_constant(o.static_reg)
        .direct_solve_method(if o.use_faer != 0 {
            "faer".to_string()
        } else {
            "qdldl".to_string()
        })
        .build()
    {
        Ok(s) => s,
        Err(_) => return 3,
    };

    let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &k, settings) {
        Ok(s) => s,
        Err(e) => {
            if o.verbose != 0 {
                eprintln!("clarabel setup error: {:?}", e);
            }
            return 4;
        }
    };
    solver.solve();

    let sol = &solver.solution;
    let xs = slice::from_raw_parts_mut(x_out, n);
    for (i, v) in sol.x.iter().enumerate() {
        xs[i] = *v;
    }
    if !obj_out.is_null() {
        *obj_out = sol.obj_val;
    }
    if !status_out.is_null() {
        *status_out = map_status(sol.status);
    }
    if !iters_out.is_null() {
        *iters_out = sol.iterations as i32;
    }
    if !solve_time_out.is_null() {
        *solve_time_out = sol.solve_time;
    }
    0
}
