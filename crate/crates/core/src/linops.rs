//! Shift operators, their compressions, Hankel blocks, and the derived
//! constants `A_k`, `B_k`, `C_k` on homogeneous components.
//!
//! Spectral quantities are computed in floating point; for fixtures whose
//! squares are rational, companion routines certify the values exactly via
//! Gram matrices, determinants and rational PSD checks.

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::mat::{Mat, RatMat};
use crate::poly::{dim_homog, BasisOrder, ExactPoly, FloatPoly, HomogeneousPolynomial, MultiIndex};
use crate::scalar::{GaussRat, Rat, Scalar};
use crate::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero
/// when extracting range spaces.
pub const RANK_TOL: f64 = 1e-10;

/// The matrix of `M_{z_i}: P_k -> P_{k+1}` in the global basis order.
///
/// Columns are indexed by the degree-`k` basis; column `a` has its single 1
/// in row `a + e_i`. Stored as the row index per column.
#[derive(Clone, Debug)]
pub struct ShiftMatrix {
    pub d: usize,
    pub k: usize,
    pub var: usize,
    row_of_col: Vec<usize>,
    nrows: usize,
}

impl ShiftMatrix {
    pub fn ncols(&self) -> usize {
        self.row_of_col.len()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn row_for_col(&self, col: usize) -> usize {
        self.row_of_col[col]
    }

    pub fn to_mat<S: Scalar>(&self) -> Mat<S> {
        let mut m = Mat::zeros(self.nrows, self.ncols());
        for (col, &row) in self.row_of_col.iter().enumerate() {
            m[(row, col)] = S::one();
        }
        m
    }

    /// `S^T V` for `V` with rows indexed by the degree-`k+1` basis; this is
    /// the matrix of `M_{z_i}^*` applied to the columns of `V`.
    pub fn adjoint_apply<S: Scalar>(&self, v: &Mat<S>) -> Mat<S> {
        assert_eq!(v.nrows(), self.nrows);
        Mat::from_fn(self.ncols(), v.ncols(), |i, j| {
            v[(self.row_of_col[i], j)].clone()
        })
    }
}

/// Builds `M_{z_i}: P_k -> P_{k+1}` with `var` numbered 1..d.
pub fn shift_matrix(d: usize, k: usize, var: usize) -> Result<ShiftMatrix> {
    if d == 0 {
        return Err(Error::Dimension("need d >= 1".into()));
    }
    if var == 0 || var > d {
        return Err(Error::IndexOutOfRange(format!(
            "variable {var} outside 1..{d}"
        )));
    }
    let src = BasisOrder::new(d, k);
    let dst = BasisOrder::new(d, k + 1);
    let row_of_col = src
        .iter()
        .map(|m| {
            dst.position(&m.bump(var))
                .expect("shifted monomial in basis")
        })
        .collect();
    Ok(ShiftMatrix {
        d,
        k,
        var,
        row_of_col,
        nrows: dst.dim(),
    })
}

/// `M_{z_i}^* L_k M_{z_i}` as a matrix on the degree-`k-1` component;
/// entrywise `(b', b) -> L_k[b' + e_i, b + e_i]`.
pub fn compress<S: Scalar>(lk: &Mat<S>, d: usize, k: usize, var: usize) -> Result<Mat<S>> {
    if k == 0 {
        return Err(Error::IndexOutOfRange("compress needs k >= 1".into()));
    }
    let dim_k = dim_homog(d, k);
    if lk.nrows() != dim_k || lk.ncols() != dim_k {
        return Err(Error::Dimension(format!(
            "block is {}x{}, degree-{k} component has dimension {dim_k}",
            lk.nrows(),
            lk.ncols()
        )));
    }
    let s = shift_matrix(d, k - 1, var)?;
    Ok(Mat::from_fn(s.ncols(), s.ncols(), |i, j| {
        lk[(s.row_for_col(i), s.row_for_col(j))].clone()
    }))
}

/// A Hankel block `G_q|_{P_k}: P_k -> P_{n-k}` with entries `c_{a+b}(q)`.
#[derive(Clone)]
pub struct HankelBlock<S> {
    pub n: u32,
    pub k: usize,
    pub mat: Mat<S>,
}

pub fn hankel_matrix<S: Scalar>(q: &HomogeneousPolynomial<S>, k: usize) -> Result<HankelBlock<S>> {
    let n = q.degree() as usize;
    if k > n {
        return Err(Error::IndexOutOfRange(format!("k={k} exceeds degree {n}")));
    }
    let cols = BasisOrder::new(q.d(), k);
    let rows = BasisOrder::new(q.d(), n - k);
    let mat = Mat::from_fn(rows.dim(), cols.dim(), |bi, ai| {
        q.coeff(&rows.monomial(bi).add(cols.monomial(ai)))
    });
    Ok(HankelBlock {
        n: q.degree(),
        k,
        mat,
    })
}

/// The block of `M_{z_i}^* G_q|_{P_k}: P_k -> P_{n-k-1}`, entries `c_{a+b+e_i}(q)`.
pub fn hankel_shifted<S: Scalar>(
    q: &HomogeneousPolynomial<S>,
    k: usize,
    var: usize,
) -> Result<Mat<S>> {
    let n = q.degree() as usize;
    if k + 1 > n {
        return Err(Error::IndexOutOfRange(format!(
            "k={k} exceeds degree {n} - 1"
        )));
    }
    if var == 0 || var > q.d() {
        return Err(Error::IndexOutOfRange(format!(
            "variable {var} outside 1..{}",
            q.d()
        )));
    }
    let cols = BasisOrder::new(q.d(), k);
    let rows = BasisOrder::new(q.d(), n - k - 1);
    let e = MultiIndex::unit(q.d(), var);
    Ok(Mat::from_fn(rows.dim(), cols.dim(), |bi, ai| {
        q.coeff(&rows.monomial(bi).add(cols.monomial(ai)).add(&e))
    }))
}

/// `A_k(q) = ||G_q|_{P_k}||`.
pub fn constant_a(q: &FloatPoly, k: usize) -> Result<f64> {
    Ok(hankel_matrix(q, k)?.mat.spectral_norm())
}

/// `B_k(q) = max_i ||M_{z_i}^* G_q|_{P_k}||`.
pub fn constant_b(q: &FloatPoly, k: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for var in 1..=q.d() {
        best = best.max(hankel_shifted(q, k, var)?.spectral_norm());
    }
    Ok(best)
}

/// `C_k(q) = max_i ||M_{z_i}^* restricted to G_q(P_k)||`.
pub fn constant_c(q: &FloatPoly, k: usize) -> Result<f64> {
    let n = q.degree() as usize;
    if k + 1 > n {
        return Err(Error::IndexOutOfRange(format!(
            "k={k} exceeds degree {n} - 1"
        )));
    }
    let h = hankel_matrix(q, k)?.mat;
    let v = h.column_space_orthonormal(RANK_TOL);
    if v.ncols() == 0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for var in 1..=q.d() {
        let s = shift_matrix(q.d(), n - k - 1, var)?;
        best = best.max(s.adjoint_apply(&v).spectral_norm());
    }
    Ok(best)
}

/// `G_{q-hat}^* G_{q-hat}` restricted to `P_k`, via the Hankel product.
pub fn gamma_star_gamma<S: Scalar>(q: &HomogeneousPolynomial<S>, k: usize) -> Result<Mat<S>> {
    let h = hankel_matrix(&q.hat(), k)?.mat;
    Ok(h.adjoint().matmul(&h))
}

/// The same operator as a sum of rank-one terms `v_g v_g^*` over `|g| = n-k`,
/// where `v_g` collects the coefficients of `M_{z^g}^* q`. Kept as an
/// independent construction for cross-checking.
pub fn gamma_star_gamma_rank_one<S: Scalar>(
    q: &HomogeneousPolynomial<S>,
    k: usize,
) -> Result<Mat<S>> {
    let n = q.degree() as usize;
    if k > n {
        return Err(Error::IndexOutOfRange(format!("k={k} exceeds degree {n}")));
    }
    let basis_k = BasisOrder::new(q.d(), k);
    let gammas = BasisOrder::new(q.d(), n - k);
    let mut acc = Mat::zeros(basis_k.dim(), basis_k.dim());
    for g in gammas.iter() {
        let vg = q.shift_down(g)?.coeff_vec(&basis_k);
        acc = acc.add(&Mat::outer(&vg, &vg));
    }
    Ok(acc)
}

// -- exact certification of spectral quantities ------------------------------

/// Rationalizes a float by continued fractions; `None` when no small-denominator
/// rational reproduces it to 1e-9 relative accuracy.
pub fn rationalize(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-9 * x.abs().max(1.0);
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(0));
    let (mut p1, mut q1) = (
        num_bigint::BigInt::from(rest.floor() as i64),
        num_bigint::BigInt::from(1),
    );
    rest -= rest.floor();
    for _ in 0..40 {
        let approx = Rat::new(p1.clone(), q1.clone());
        let err = (crate::scalar::rat_to_f64(&approx) - x.abs()).abs();
        if err <= tol {
            let r = if negative { -approx } else { approx };
            return Some(r);
        }
        if rest == 0.0 || q1 > num_bigint::BigInt::from(1_000_000_000_000i64) {
            break;
        }
        rest = 1.0 / rest;
        let a = rest.floor();
        if a >= 9e15 {
            break;
        }
        rest -= a;
        let ai = num_bigint::BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

fn gram(m: &RatMat) -> RatMat {
    m.adjoint().matmul(m)
}

/// Certifies that `claimed` equals the squared top singular value of `m`:
/// `claimed` must be an eigenvalue of the Gram matrix and dominate it.
pub fn verify_top_singular_sq(m: &RatMat, claimed: &Rat) -> Result<bool> {
    if claimed.is_negative() {
        return Ok(false);
    }
    let g = gram(m);
    let c = GaussRat::from_rat(claimed.clone());
    let shifted = RatMat::identity(g.nrows()).scale(&c).sub(&g);
    Ok(shifted.is_psd()? && shifted.det()?.is_zero())
}

/// Computes the squared top singular value exactly, certifying a
/// continued-fraction rationalization of the float hint.
pub fn exact_top_singular_sq(m: &RatMat, hint: f64) -> Result<Rat> {
    let claimed = rationalize(hint * hint).ok_or_else(|| {
        Error::ExactUnavailable(format!(
            "top singular value^2 {:.17} is not a small rational",
            hint * hint
        ))
    })?;
    if verify_top_singular_sq(m, &claimed)? {
        Ok(claimed)
    } else {
        Err(Error::ExactUnavailable(format!(
            "rational candidate {} failed exact certification",
            crate::scalar::format_rat(&claimed)
        )))
    }
}

/// Exact `max_i` of squared top singular values across a family, certified by
/// domination over every member plus attainment in at least one.
pub fn exact_max_top_singular_sq(mats: &[RatMat], hint: f64) -> Result<Rat> {
    let claimed = rationalize(hint * hint).ok_or_else(|| {
        Error::ExactUnavailable(format!(
            "value^2 {:.17} is not a small rational",
            hint * hint
        ))
    })?;
    let c = GaussRat::from_rat(claimed.clone());
    let mut attained = false;
    for m in mats {
        let g = gram(m);
        let shifted = RatMat::identity(g.nrows()).scale(&c).sub(&g);
        if !shifted.is_psd()? {
            return Err(Error::ExactUnavailable(
                "candidate does not dominate all branches".into(),
            ));
        }
        if shifted.det()?.is_zero() {
            attained = true;
        }
    }
    if !attained {
        return Err(Error::ExactUnavailable(
            "candidate not attained by any branch".into(),
        ));
    }
    Ok(claimed)
}

/// Exact `A_k(q)^2`.
pub fn exact_constant_a_sq(q: &ExactPoly, k: usize) -> Result<Rat> {
    let h = hankel_matrix(q, k)?.mat;
    let hint = constant_a(&q.to_float(), k)?;
    exact_top_singular_sq(&h, hint)
}

/// Exact `B_k(q)^2`.
pub fn exact_constant_b_sq(q: &ExactPoly, k: usize) -> Result<Rat> {
    let mats: Vec<RatMat> = (1..=q.d())
        .map(|var| hankel_shifted(q, k, var))
        .collect::<Result<_>>()?;
    let hint = constant_b(&q.to_float(), k)?;
    exact_max_top_singular_sq(&mats, hint)
}

/// Exact `C_k(q)^2` via the generalized pencil `c W^*W - W^*S S^T W` over an
/// exact basis `W` of the Hankel range.
pub fn exact_constant_c_sq(q: &ExactPoly, k: usize) -> Result<Rat> {
    let n = q.degree() as usize;
    let h = hankel_matrix(q, k)?.mat;
    let w = h.column_space_basis()?;
    if w.ncols() == 0 {
        return Ok(Rat::zero());
    }
    let hint = constant_c(&q.to_float(), k)?;
    let claimed = rationalize(hint * hint).ok_or_else(|| {
        Error::ExactUnavailable(format!("C^2 {:.17} is not a small rational", hint * hint))
    })?;
    let b = gram(&w);
    let cb = b.scale(&GaussRat::from_rat(claimed.clone()));
    let mut attained = false;
    for var in 1..=q.d() {
        let s = shift_matrix(q.d(), n - k - 1, var)?;
        let sw = s.adjoint_apply(&w);
        let a = gram(&sw);
        let pencil = cb.sub(&a);
        if !pencil.is_psd()? {
            return Err(Error::ExactUnavailable(
                "C^2 candidate does not dominate all variables".into(),
            ));
        }
        if pencil.det()?.is_zero() {
            attained = true;
        }
    }
    if !attained {
        return Err(Error::ExactUnavailable("C^2 candidate not attained".into()));
    }
    Ok(claimed)
}

/// Checks an exact eigenvalue multiset via the characteristic polynomial.
pub fn exact_eigenvalue_multiset(m: &RatMat, claimed: &[Rat]) -> Result<bool> {
    if !m.is_square() || m.nrows() != claimed.len() {
        return Ok(false);
    }
    let chi = m.char_poly()?;
    Ok(chi == crate::mat::poly_from_roots(claimed))
}

/// Top singular value of a complex float matrix (free function convenience).
pub fn spectral_norm(m: &Mat<Complex64>) -> f64 {
    m.spectral_norm()
}
