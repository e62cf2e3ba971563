//! Bridge from the canonical problem form to the interior-point backend.
//!
//! The lowered problem (PSD variables + equalities) maps directly onto the
//! conic form `min q'x : Ax + s = b, s in ZeroCone x PSDTriangle...` with
//! x = [scaled block triangles..., free scalars]. Reported solutions are
//! re-verified outside the solver: equality residuals, block eigenvalue
//! floors and the duality gap are checked against the requested tolerances
//! before a solution is labeled optimal.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::DMatrix;

use super::{Atom, SdpProblem, SdpSolution, Sense, SolveStatus};
use crate::Result;

const SQRT2: f64 = std::f64::consts::SQRT_2;

struct Layout {
    block_offsets: Vec<usize>,
    free_offset: usize,
    nvars: usize,
}

fn layout(p: &SdpProblem) -> Layout {
    let mut off = 0usize;
    let mut block_offsets = Vec::with_capacity(p.blocks().len());
    for (_, dim) in p.blocks() {
        block_offsets.push(off);
        off += dim * (dim + 1) / 2;
    }
    Layout {
        block_offsets,
        free_offset: off,
        nvars: off + p.nfree(),
    }
}

fn tri_index(r: usize, c: usize) -> usize {
    debug_assert!(r <= c);
    c * (c + 1) / 2 + r
}

fn atom_column(lay: &Layout, atom: &Atom) -> (usize, f64) {
    match atom {
        Atom::Entry(b, r, c) => {
            let col = lay.block_offsets[b.0] + tri_index(*r, *c);
            let scale = if r == c { 1.0 } else { 1.0 / SQRT2 };
            (col, scale)
        }
        Atom::Free(f) => (lay.free_offset + f, 1.0),
    }
}

/// Sorted-by-column triplet assembly into CSC with duplicate accumulation.
fn csc_from_triplets(
    nrows: usize,
    ncols: usize,
    mut trips: Vec<(usize, usize, f64)>,
) -> CscMatrix<f64> {
    trips.sort_by_key(|&(r, c, _)| (c, r));
    let mut rowval: Vec<usize> = Vec::with_capacity(trips.len());
    let mut nzval: Vec<f64> = Vec::with_capacity(trips.len());
    let mut col_counts = vec![0usize; ncols];
    let mut last: Option<(usize, usize)> = None;
    for (r, c, v) in trips {
        if last == Some((r, c)) {
            *nzval.last_mut().unwrap() += v;
        } else {
            rowval.push(r);
            nzval.push(v);
            col_counts[c] += 1;
            last = Some((r, c));
        }
    }
    let mut colptr = vec![0usize; ncols + 1];
    for c in 0..ncols {
        colptr[c + 1] = colptr[c] + col_counts[c];
    }
    CscMatrix::new(nrows, ncols, colptr, rowval, nzval)
}

/// Solves the problem; see the module docs for the verification contract.
pub fn solve(problem: &SdpProblem, gap_tol: f64, feas_tol: f64) -> Result<SdpSolution> {
    let low = problem.lowered();
    let lay = layout(&low);

    // objective in clarabel's minimization convention
    let sense_flip = match low.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut q = vec![0.0; lay.nvars];
    for (a, w) in &low.objective.terms {
        let (col, scale) = atom_column(&lay, a);
        q[col] += sense_flip * w * scale;
    }

    // rows: equalities first, then one row per scaled triangle entry per block
    let mut trips: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = Vec::new();
    let mut row = 0usize;
    for eq in &low.eqs {
        for (a, w) in &eq.expr.terms {
            let (col, scale) = atom_column(&lay, a);
            trips.push((row, col, w * scale));
        }
        b.push(-eq.expr.constant);
        row += 1;
    }
    let n_eq = row;
    for (bi, (_, dim)) in low.blocks().iter().enumerate() {
        let tlen = dim * (dim + 1) / 2;
        for t in 0..tlen {
            trips.push((row, lay.block_offsets[bi] + t, -1.0));
            b.push(0.0);
            row += 1;
        }
    }
    let a_mat = csc_from_triplets(row, lay.nvars, trips);
    let p_mat = CscMatrix::<f64>::zeros((lay.nvars, lay.nvars));

    let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(1 + low.blocks().len());
    if n_eq > 0 {
        cones.push(SupportedConeT::ZeroConeT(n_eq));
    }
    for (_, dim) in low.blocks() {
        cones.push(SupportedConeT::PSDTriangleConeT(*dim));
    }

    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(400)
        .tol_gap_abs((gap_tol * 0.05).max(1e-12))
        .tol_gap_rel((gap_tol * 0.05).max(1e-12))
        .tol_feas((feas_tol * 0.05).max(1e-12))
        .build()
        .map_err(|e| crate::Error::Solver {
            status: "settings".into(),
            detail: e.to_string(),
        })?;

    let mut solver = DefaultSolver::new(&p_mat, &q, &a_mat, &b, &cones, settings).map_err(|e| {
        crate::Error::Solver {
            status: "setup".into(),
            detail: e.to_string(),
        }
    })?;
    solver.solve();
    let sol = &solver.solution;

    // a returned point is only trusted after the outside re-verification below,
    // so iteration-limited runs still count when they meet the requested tolerances
    let status = match sol.status {
        SolverStatus::Solved
        | SolverStatus::AlmostSolved
        | SolverStatus::MaxIterations
        | SolverStatus::InsufficientProgress => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            SolveStatus::NumericalFailure("objective unbounded (dual infeasible)".into())
        }
        other => SolveStatus::NumericalFailure(format!("{other:?}")),
    };

    let primal = sense_flip * sol.obj_val + low.objective.constant;
    let dual = sense_flip * sol.obj_val_dual + low.objective.constant;
    let gap = (sol.obj_val - sol.obj_val_dual).abs();

    let mut blocks = Vec::with_capacity(low.blocks().len());
    for (bi, (name, dim)) in low.blocks().iter().enumerate() {
        let off = lay.block_offsets[bi];
        let m = DMatrix::from_fn(*dim, *dim, |r, c| {
            let (r0, c0) = if r <= c { (r, c) } else { (c, r) };
            let v = sol.x[off + tri_index(r0, c0)];
            if r0 == c0 {
                v
            } else {
                v / SQRT2
            }
        });
        blocks.push((name.clone(), m));
    }
    let free_values = sol.x[lay.free_offset..].to_vec();

    let status = if status == SolveStatus::Optimal {
        match verify(
            &low,
            &blocks,
            &free_values,
            primal,
            dual,
            gap,
            gap_tol,
            feas_tol,
        ) {
            SolveStatus::Optimal => SolveStatus::Optimal,
            SolveStatus::NumericalFailure(msg) => {
                SolveStatus::NumericalFailure(format!("{msg} (solver status {:?})", sol.status))
            }
            s => s,
        }
    } else {
        status
    };

    Ok(SdpSolution {
        status,
        primal,
        dual,
        gap,
        blocks,
        free_values,
        iterations: solver.info.iterations,
    })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    low: &SdpProblem,
    blocks: &[(String, DMatrix<f64>)],
    free_values: &[f64],
    primal: f64,
    _dual: f64,
    gap: f64,
    gap_tol: f64,
    feas_tol: f64,
) -> SolveStatus {
    let eval = |expr: &super::LinExpr| -> f64 {
        let mut acc = expr.constant;
        for (a, w) in &expr.terms {
            acc += w * match a {
                Atom::Entry(b, r, c) => blocks[b.0].1[(*r, *c)],
                Atom::Free(f) => free_values[*f],
            };
        }
        acc
    };
    let mut scale = 1.0f64;
    for eq in &low.eqs {
        scale = scale.max(eq.expr.constant.abs());
    }
    for eq in &low.eqs {
        let r = eval(&eq.expr).abs();
        if r > feas_tol * 10.0 * (1.0 + scale) {
            return SolveStatus::NumericalFailure(format!(
                "equality residual {r:.3e} on {} exceeds tolerance",
                eq.label
            ));
        }
    }
    for (name, m) in blocks {
        if m.nrows() == 0 {
            continue;
        }
        let min_eig = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        let floor = feas_tol * 10.0 * (1.0 + m.amax());
        if min_eig < -floor {
            return SolveStatus::NumericalFailure(format!(
                "block {name} has eigenvalue {min_eig:.3e} below -{floor:.3e}"
            ));
        }
    }
    if gap > gap_tol * (1.0 + primal.abs()) {
        return SolveStatus::NumericalFailure(format!(
            "duality gap {gap:.3e} exceeds tolerance at value {primal:.6}"
        ));
    }
    SolveStatus::Optimal
}
