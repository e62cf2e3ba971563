//! Block-structured semidefinite programs and the solver contract.
//!
//! A problem consists of named symmetric PSD matrix variables, free scalar
//! variables, affine equality constraints, affine PSD-order constraints
//! (lowered to slack blocks before the solver sees them), and a linear
//! objective. All data is real symmetric; complex Hermitian data must be
//! embedded first via [`embed_hermitian`].

mod solve;

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::mat::Mat;
use crate::{Error, Result};

pub use solve::solve;

/// Reference to a declared PSD matrix variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockId(pub usize);

/// One scalar atom inside a linear expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Atom {
    /// Entry (r, c) of a PSD block; (r, c) and (c, r) refer to the same
    /// symmetric entry and are canonicalized to r <= c.
    Entry(BlockId, usize, usize),
    /// A free scalar variable.
    Free(usize),
}

/// Affine expression `sum coeff * atom + constant`.
#[derive(Clone, Debug, Default)]
pub struct LinExpr {
    pub terms: Vec<(Atom, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn entry(b: BlockId, r: usize, c: usize) -> Self {
        let mut e = Self::zero();
        e.push_entry(b, r, c, 1.0);
        e
    }

    pub fn free(ix: usize) -> Self {
        LinExpr {
            terms: vec![(Atom::Free(ix), 1.0)],
            constant: 0.0,
        }
    }

    pub fn push_entry(&mut self, b: BlockId, r: usize, c: usize, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        self.terms.push((Atom::Entry(b, r, c), coeff));
    }

    pub fn push_free(&mut self, ix: usize, coeff: f64) {
        if coeff != 0.0 {
            self.terms.push((Atom::Free(ix), coeff));
        }
    }

    pub fn push(&mut self, other: &LinExpr, scale: f64) {
        for &(a, w) in &other.terms {
            self.terms.push((a, w * scale));
        }
        self.constant += other.constant * scale;
    }

    pub fn scaled(&self, s: f64) -> LinExpr {
        LinExpr {
            terms: self.terms.iter().map(|&(a, w)| (a, w * s)).collect(),
            constant: self.constant * s,
        }
    }
}

/// Symmetric matrix of affine expressions; only the upper triangle is stored.
#[derive(Clone, Debug)]
pub struct SymExpr {
    pub dim: usize,
    upper: Vec<LinExpr>,
}

impl SymExpr {
    pub fn zeros(dim: usize) -> Self {
        SymExpr {
            dim,
            upper: vec![LinExpr::zero(); dim * (dim + 1) / 2],
        }
    }

    fn tri(&self, r: usize, c: usize) -> usize {
        debug_assert!(r <= c && c < self.dim);
        c * (c + 1) / 2 + r
    }

    pub fn at(&self, r: usize, c: usize) -> &LinExpr {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        &self.upper[self.tri(r, c)]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut LinExpr {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        let ix = self.tri(r, c);
        &mut self.upper[ix]
    }

    /// The whole block variable as an expression matrix.
    pub fn of_block(id: BlockId, dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for c in 0..dim {
            for r in 0..=c {
                m.at_mut(r, c).push_entry(id, r, c, 1.0);
            }
        }
        m
    }

    /// Adds `scale * M` for a constant symmetric matrix.
    pub fn add_const(&mut self, m: &DMatrix<f64>, scale: f64) {
        assert_eq!(m.nrows(), self.dim);
        for c in 0..self.dim {
            for r in 0..=c {
                self.at_mut(r, c).constant += scale * m[(r, c)];
            }
        }
    }

    /// Adds `scale * X[block]` entrywise.
    pub fn add_block(&mut self, id: BlockId, dim: usize, scale: f64) {
        assert_eq!(dim, self.dim);
        for c in 0..self.dim {
            for r in 0..=c {
                self.at_mut(r, c).push_entry(id, r, c, scale);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Equality constraint `expr == 0` (the constant absorbs the right-hand side).
#[derive(Clone, Debug)]
pub struct EqConstraint {
    pub label: String,
    pub expr: LinExpr,
}

/// PSD-order constraint `expr_matrix >= 0`.
#[derive(Clone, Debug)]
pub struct PsdConstraint {
    pub label: String,
    pub expr: SymExpr,
}

/// Block-structured SDP in the crate's canonical form.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    blocks: Vec<(String, usize)>,
    nfree: usize,
    pub eqs: Vec<EqConstraint>,
    pub psd_cons: Vec<PsdConstraint>,
    pub objective: LinExpr,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        SdpProblem {
            blocks: Vec::new(),
            nfree: 0,
            eqs: Vec::new(),
            psd_cons: Vec::new(),
            objective: LinExpr::zero(),
            sense,
        }
    }

    /// Declares a PSD matrix variable.
    pub fn add_block(&mut self, name: impl Into<String>, dim: usize) -> BlockId {
        self.blocks.push((name.into(), dim));
        BlockId(self.blocks.len() - 1)
    }

    pub fn add_free(&mut self) -> usize {
        self.nfree += 1;
        self.nfree - 1
    }

    pub fn blocks(&self) -> &[(String, usize)] {
        &self.blocks
    }

    pub fn nfree(&self) -> usize {
        self.nfree
    }

    pub fn block_dim(&self, id: BlockId) -> usize {
        self.blocks[id.0].1
    }

    /// `expr == rhs`.
    pub fn add_eq(&mut self, label: impl Into<String>, mut expr: LinExpr, rhs: f64) {
        expr.constant -= rhs;
        self.eqs.push(EqConstraint {
            label: label.into(),
            expr,
        });
    }

    /// `expr_matrix >= 0` in the PSD order.
    pub fn add_psd(&mut self, label: impl Into<String>, expr: SymExpr) {
        self.psd_cons.push(PsdConstraint {
            label: label.into(),
            expr,
        });
    }

    pub fn set_objective(&mut self, obj: LinExpr) {
        self.objective = obj;
    }

    /// Lowers every PSD-order constraint to a fresh slack block plus entrywise
    /// equalities, leaving only PSD variables and equality constraints.
    pub fn lowered(&self) -> SdpProblem {
        let mut out = self.clone();
        out.psd_cons.clear();
        for con in &self.psd_cons {
            let dim = con.expr.dim;
            let slack = out.add_block(format!("slack:{}", con.label), dim);
            for c in 0..dim {
                for r in 0..=c {
                    let mut e = LinExpr::zero();
                    e.push_entry(slack, r, c, 1.0);
                    e.push(con.expr.at(r, c), -1.0);
                    out.eqs.push(EqConstraint {
                        label: format!("{}[{},{}]", con.label, r, c),
                        expr: e,
                    });
                }
            }
        }
        out
    }

    /// The Lagrangian conic dual, built mechanically from the lowered data.
    ///
    /// For `max c'x : Ax + a = 0, X_j >= 0` over scalar variables x (the
    /// upper-triangle block entries and the free scalars), the Lagrangian
    /// `c'x + y'(Ax+a) + sum_j <Y_j, X_j>` is bounded iff per scalar variable
    /// the coefficients cancel; off-diagonal entries pick up the Frobenius
    /// multiplicity 2. The dual is `min y'a` over those stationarity
    /// equalities with `Y_j >= 0`. Minimization problems dualize with the
    /// multiplier sign and sense flipped. Strong duality makes the dual
    /// optimum equal the primal optimum in the problem's own sense.
    pub fn conic_dual(&self) -> SdpProblem {
        let low = self.lowered();
        let (mult_sign, dual_sense) = match low.sense {
            Sense::Maximize => (1.0, Sense::Minimize),
            Sense::Minimize => (-1.0, Sense::Maximize),
        };
        let mut dual = SdpProblem::new(dual_sense);
        let mult: Vec<BlockId> = low
            .blocks
            .iter()
            .map(|(name, dim)| dual.add_block(format!("y:{name}"), *dim))
            .collect();
        let y: Vec<usize> = (0..low.eqs.len()).map(|_| dual.add_free()).collect();

        use std::collections::HashMap;
        let mut rows: HashMap<(usize, usize, usize), LinExpr> = HashMap::new();
        let mut free_rows: HashMap<usize, LinExpr> = HashMap::new();
        let key = |a: &Atom| match a {
            Atom::Entry(b, r, c) => (b.0, *r, *c),
            Atom::Free(_) => unreachable!(),
        };
        for (ci, eq) in low.eqs.iter().enumerate() {
            for (a, w) in &eq.expr.terms {
                match a {
                    Atom::Entry(..) => rows.entry(key(a)).or_default().push_free(y[ci], *w),
                    Atom::Free(f) => free_rows.entry(*f).or_default().push_free(y[ci], *w),
                }
            }
        }
        let mut obj_entry: HashMap<(usize, usize, usize), f64> = HashMap::new();
        let mut obj_free: HashMap<usize, f64> = HashMap::new();
        for (a, w) in &low.objective.terms {
            match a {
                Atom::Entry(..) => *obj_entry.entry(key(a)).or_default() += *w,
                Atom::Free(f) => *obj_free.entry(*f).or_default() += *w,
            }
        }
        // stationarity: A'y + sign * m_rc * Y = -c per entry, A'y = -c per free var
        for (bix, (_, dim)) in low.blocks.iter().enumerate() {
            for c in 0..*dim {
                for r in 0..=c {
                    let mut e = rows.remove(&(bix, r, c)).unwrap_or_default();
                    let frobenius_mult = if r == c { 1.0 } else { 2.0 };
                    e.push_entry(mult[bix], r, c, mult_sign * frobenius_mult);
                    let rhs = -obj_entry.get(&(bix, r, c)).copied().unwrap_or(0.0);
                    dual.add_eq(format!("stat:b{bix}[{r},{c}]"), e, rhs);
                }
            }
        }
        for f in 0..low.nfree {
            let e = free_rows.remove(&f).unwrap_or_default();
            let rhs = -obj_free.get(&f).copied().unwrap_or(0.0);
            dual.add_eq(format!("stat:u{f}"), e, rhs);
        }
        // dual objective y'a, plus the primal's objective constant
        let mut obj = LinExpr::zero();
        for (ci, eq) in low.eqs.iter().enumerate() {
            obj.push_free(y[ci], eq.expr.constant);
        }
        obj.constant = low.objective.constant;
        dual.set_objective(obj);
        dual
    }

    /// Sparse SDPA-like text dump of the lowered problem for external
    /// cross-validation: block sizes, objective triplets, constraint triplets.
    pub fn write_sdpa_like(&self) -> String {
        let low = self.lowered();
        let mut s = String::new();
        let _ = writeln!(s, "* aglerkit sdpa-like dump");
        let _ = writeln!(s, "* sense {:?}", low.sense);
        let _ = writeln!(s, "{} = mdim (equalities)", low.eqs.len());
        let _ = writeln!(s, "{} = nblocks (+{} free)", low.blocks.len(), low.nfree);
        let sizes: Vec<String> = low.blocks.iter().map(|(_, d)| d.to_string()).collect();
        let _ = writeln!(s, "{}", sizes.join(" "));
        let rhs: Vec<String> = low
            .eqs
            .iter()
            .map(|e| format!("{}", -e.expr.constant))
            .collect();
        let _ = writeln!(s, "{}", rhs.join(" "));
        let emit = |matno: usize, expr: &LinExpr, out: &mut String| {
            for (a, w) in &expr.terms {
                match a {
                    Atom::Entry(b, r, c) => {
                        let _ = writeln!(out, "{} {} {} {} {}", matno, b.0 + 1, r + 1, c + 1, w);
                    }
                    Atom::Free(f) => {
                        let _ = writeln!(out, "{} F {} 0 {}", matno, f + 1, w);
                    }
                }
            }
        };
        emit(0, &low.objective, &mut s);
        for (ci, eq) in low.eqs.iter().enumerate() {
            emit(ci + 1, &eq.expr, &mut s);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure(String),
}

/// Solution of a lowered problem.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Objective value in the problem's own sense.
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    /// Values of the declared PSD matrix variables, in declaration order
    /// (slack blocks from lowering included, after the declared ones).
    pub blocks: Vec<(String, DMatrix<f64>)>,
    pub free_values: Vec<f64>,
    pub iterations: u32,
}

impl SdpSolution {
    pub fn block(&self, name: &str) -> Option<&DMatrix<f64>> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` of a complex
/// Hermitian matrix. PSD iff `H` is PSD; every eigenvalue is duplicated, so
/// traces and objective values carry a factor 2.
pub fn embed_hermitian(h: &Mat<Complex64>) -> Result<DMatrix<f64>> {
    if !h.is_hermitian_tol(1e-12 * (1.0 + h.max_abs())) {
        return Err(Error::NonHermitian(format!(
            "{}x{} embed input",
            h.nrows(),
            h.ncols()
        )));
    }
    let m = h.nrows();
    Ok(DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let (bi, r) = (i / m, i % m);
        let (bj, c) = (j / m, j % m);
        match (bi, bj) {
            (0, 0) | (1, 1) => h[(r, c)].re,
            (0, 1) => -h[(r, c)].im,
            (1, 0) => h[(r, c)].im,
            _ => unreachable!(),
        }
    }))
}
