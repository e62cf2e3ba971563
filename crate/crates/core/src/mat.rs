//! Dense matrices over the crate's scalar types.
//!
//! One generic container serves both worlds: `Mat<GaussRat>` for exact
//! certificate arithmetic (pivoted LDL^T positivity, determinants,
//! characteristic polynomials) and `Mat<Complex64>` as a thin bridge to
//! nalgebra for spectral computations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::scalar::{GaussRat, Rat, Scalar};
use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    nrows: usize,
    ncols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat {
            nrows,
            ncols,
            data: vec![S::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Mat { nrows, ncols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Mat {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Outer product `u v^*`.
    pub fn outer(u: &[S], v: &[S]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i].clone() * v[j].conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.ncols {
                    let t = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            s.clone() * self[(i, j)].clone()
        })
    }

    pub fn trace(&self) -> S {
        assert!(self.is_square());
        let mut t = S::zero();
        for i in 0..self.nrows {
            t += self[(i, i)].clone();
        }
        t
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.ncols {
                    acc += self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && (0..self.nrows).all(|i| (i..self.ncols).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    pub fn to_c64(&self) -> Mat<Complex64> {
        Mat::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)].to_c64())
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.ncols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.ncols + j]
    }
}

impl<S: Scalar> std::fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Exact rational matrix.
pub type RatMat = Mat<GaussRat>;

impl Mat<Complex64> {
    pub fn to_na(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)])
    }

    pub fn from_na(m: &DMatrix<Complex64>) -> Self {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian_tol(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.nrows).all(|i| {
                (i..self.ncols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol)
            })
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.nrows == 0 || self.ncols == 0 {
            return 0.0;
        }
        self.to_na().singular_values().max()
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        if self.nrows == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self
            .to_na()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Orthonormal basis of the column space, with singular values below
    /// `rank_tol` times the largest treated as zero.
    pub fn column_space_orthonormal(&self, rank_tol: f64) -> Mat<Complex64> {
        if self.nrows == 0 || self.ncols == 0 {
            return Mat::zeros(self.nrows, 0);
        }
        let svd = self.to_na().svd(true, false);
        let u = svd.u.as_ref().expect("svd requested u");
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > rank_tol * smax && s > 0.0)
            .count();
        Mat::from_fn(self.nrows, rank, |i, j| u[(i, j)])
    }
}

impl RatMat {
    pub fn is_hermitian_exact(&self) -> bool {
        self.is_hermitian()
    }

    /// Pivoted LDL^T positive-semidefiniteness test.
    ///
    /// Eliminates on the largest remaining diagonal entry. A negative pivot
    /// refutes positivity; when every remaining diagonal entry is zero the
    /// matrix is PSD iff the remaining submatrix is entirely zero.
    pub fn is_psd(&self) -> Result<bool> {
        if !self.is_hermitian() {
            return Err(Error::NonHermitian(
                "is_psd expects a Hermitian matrix".into(),
            ));
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            // diagonal of a Hermitian matrix is real
            let mut best: Option<(usize, Rat)> = None;
            for (pos, &idx) in active.iter().enumerate() {
                let d = a[(idx, idx)].re.clone();
                if d.is_negative() {
                    return Ok(false);
                }
                match &best {
                    Some((_, bd)) if *bd >= d => {}
                    _ => best = Some((pos, d)),
                }
            }
            let (pivot_pos, pivot_val) = best.unwrap();
            if pivot_val.is_zero() {
                // all remaining diagonal entries are zero
                for &i in &active {
                    for &j in &active {
                        if !a[(i, j)].is_zero() {
                            return Ok(false);
                        }
                    }
                }
                return Ok(true);
            }
            let p = active.swap_remove(pivot_pos);
            let pv = GaussRat::from_rat(pivot_val);
            for &i in &active {
                let li = a[(i, p)].div(&pv)?;
                if li.is_zero() {
                    continue;
                }
                for &j in &active {
                    let delta = li.clone() * a[(p, j)].clone();
                    let cur = a[(i, j)].clone();
                    a[(i, j)] = cur - delta;
                }
            }
        }
        Ok(true)
    }

    /// Exact determinant by fraction-free-ish Gaussian elimination over Q(i).
    pub fn det(&self) -> Result<GaussRat> {
        if !self.is_square() {
            return Err(Error::Dimension("det of non-square matrix".into()));
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut det = GaussRat::one();
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| !a[(r, col)].is_zero());
            let Some(pr) = pivot_row else {
                return Ok(GaussRat::zero());
            };
            if pr != col {
                for j in 0..n {
                    let tmp = a[(pr, j)].clone();
                    a[(pr, j)] = a[(col, j)].clone();
                    a[(col, j)] = tmp;
                }
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let f = a[(r, col)].div(&p)?;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let delta = f.clone() * a[(col, j)].clone();
                    let cur = a[(r, j)].clone();
                    a[(r, j)] = cur - delta;
                }
            }
        }
        Ok(det)
    }

    /// Monic characteristic polynomial coefficients `[1, c1, ..., cn]` with
    /// `det(lambda I - A) = sum_k c_k lambda^(n-k)`, by Faddeev-LeVerrier.
    pub fn char_poly(&self) -> Result<Vec<GaussRat>> {
        if !self.is_square() {
            return Err(Error::Dimension("char_poly of non-square matrix".into()));
        }
        let n = self.nrows;
        let mut coeffs = vec![GaussRat::one()];
        let mut m = Mat::<GaussRat>::identity(n);
        for k in 1..=n {
            let am = self.matmul(&m);
            let ck = am.trace().div(&GaussRat::from_int(k as i64)).map(|t| -t)?;
            m = am;
            for i in 0..n {
                let cur = m[(i, i)].clone();
                m[(i, i)] = cur + ck.clone();
            }
            coeffs.push(ck);
        }
        Ok(coeffs)
    }

    /// Exact rank via Gaussian elimination.
    pub fn rank(&self) -> Result<usize> {
        let mut a = self.clone();
        let (nr, nc) = (a.nrows, a.ncols);
        let mut rank = 0usize;
        let mut row = 0usize;
        for col in 0..nc {
            let pivot = (row..nr).find(|&r| !a[(r, col)].is_zero());
            let Some(pr) = pivot else { continue };
            if pr != row {
                for j in 0..nc {
                    let tmp = a[(pr, j)].clone();
                    a[(pr, j)] = a[(row, j)].clone();
                    a[(row, j)] = tmp;
                }
            }
            let p = a[(row, col)].clone();
            for r in row + 1..nr {
                let f = a[(r, col)].div(&p)?;
                if f.is_zero() {
                    continue;
                }
                for j in col..nc {
                    let delta = f.clone() * a[(row, j)].clone();
                    let cur = a[(r, j)].clone();
                    a[(r, j)] = cur - delta;
                }
            }
            rank += 1;
            row += 1;
            if row == nr {
                break;
            }
        }
        Ok(rank)
    }

    /// Columns of `self` forming a basis of the column space.
    pub fn column_space_basis(&self) -> Result<RatMat> {
        let mut a = self.clone();
        let (nr, nc) = (a.nrows, a.ncols);
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..nc {
            let pivot = (row..nr).find(|&r| !a[(r, col)].is_zero());
            let Some(pr) = pivot else { continue };
            if pr != row {
                for j in 0..nc {
                    let tmp = a[(pr, j)].clone();
                    a[(pr, j)] = a[(row, j)].clone();
                    a[(row, j)] = tmp;
                }
            }
            let p = a[(row, col)].clone();
            for r in row + 1..nr {
                let f = a[(r, col)].div(&p)?;
                if f.is_zero() {
                    continue;
                }
                for j in col..nc {
                    let delta = f.clone() * a[(row, j)].clone();
                    let cur = a[(r, j)].clone();
                    a[(r, j)] = cur - delta;
                }
            }
            pivots.push(col);
            row += 1;
            if row == nr {
                break;
            }
        }
        Ok(Mat::from_fn(nr, pivots.len(), |i, j| {
            self[(i, pivots[j])].clone()
        }))
    }
}

/// Expands `prod_k (lambda - r_k)` into monic coefficients `[1, c1, ..., cn]`.
pub fn poly_from_roots(roots: &[Rat]) -> Vec<GaussRat> {
    let mut coeffs = vec![GaussRat::one()];
    for r in roots {
        let neg_r = GaussRat::from_rat(-r.clone());
        let mut next = vec![GaussRat::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k] += c.clone();
            next[k + 1] += c.clone() * neg_r.clone();
        }
        coeffs = next;
    }
    coeffs
}
