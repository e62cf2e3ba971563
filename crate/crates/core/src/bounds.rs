//! Constructive upper bounds on the dual norm with machine-checkable
//! certificates.
//!
//! Each method assembles a graded operator whose top block is `q (x) q`, so
//! its unit value `sqrt(<L_0 1,1>)` bounds the dual norm from above. Methods
//! 1 and 2 cap the low-degree blocks with Hankel norms, method 3 telescopes
//! range-restricted shift norms, method 4 hybridizes the two, and method 5 is
//! a verifier for caller-supplied weight chains.

use num_complex::Complex64;

use crate::certify::{check_cone_membership, CheckMode, GradedOperator, ScalarMode};
use crate::linops::{
    constant_a, constant_b, constant_c, exact_constant_a_sq, exact_constant_b_sq,
    exact_constant_c_sq, gamma_star_gamma, hankel_matrix, shift_matrix, RANK_TOL,
};
use crate::mat::{Mat, RatMat};
use crate::poly::{dim_homog, ExactPoly, FloatPoly};
use crate::scalar::{rat_to_f64, GaussRat, Rat};
use crate::{Error, Result};

/// A bound value with its certificate; `exact_value_sq` is present when the
/// construction was carried out in rational arithmetic.
#[derive(Clone, Debug)]
pub struct MethodBound {
    pub method: u8,
    pub k: Option<usize>,
    pub value: f64,
    pub exact_value_sq: Option<Rat>,
    pub certificate: GradedOperator,
}

fn check_degree(q_degree: u32, k: usize, need_k_below: bool) -> Result<usize> {
    let n = q_degree as usize;
    if n == 0 {
        return Err(Error::IndexOutOfRange(
            "bound methods need degree >= 1".into(),
        ));
    }
    if need_k_below && k >= n {
        return Err(Error::IndexOutOfRange(format!(
            "k={k} exceeds degree {n} - 1"
        )));
    }
    Ok(n)
}

/// Float certificate with constant caps `cap^2 * I` below level `k` and
/// Hankel-square blocks above.
fn capped_certificate(q: &FloatPoly, k: usize, cap_sq: f64) -> Result<GradedOperator> {
    let n = q.degree() as usize;
    let mut blocks = Vec::with_capacity(n + 1);
    for j in 0..=k {
        blocks.push(
            Mat::<Complex64>::identity(dim_homog(q.d(), j)).scale(&Complex64::new(cap_sq, 0.0)),
        );
    }
    for j in k + 1..=n {
        blocks.push(gamma_star_gamma(q, j)?);
    }
    GradedOperator::from_float(q.d(), n as u32, blocks)
}

fn capped_certificate_exact(q: &ExactPoly, k: usize, cap_sq: &Rat) -> Result<GradedOperator> {
    let n = q.degree() as usize;
    let cap = GaussRat::from_rat(cap_sq.clone());
    let mut blocks = Vec::with_capacity(n + 1);
    for j in 0..=k {
        blocks.push(RatMat::identity(dim_homog(q.d(), j)).scale(&cap));
    }
    for j in k + 1..=n {
        blocks.push(gamma_star_gamma(q, j)?);
    }
    GradedOperator::from_exact(q.d(), n as u32, blocks)
}

/// Hankel-norm cap: value `A_k(q)`.
pub fn method1(q: &FloatPoly, k: usize) -> Result<MethodBound> {
    check_degree(q.degree(), k, true)?;
    let a = constant_a(q, k)?;
    Ok(MethodBound {
        method: 1,
        k: Some(k),
        value: a,
        exact_value_sq: None,
        certificate: capped_certificate(q, k, a * a)?,
    })
}

/// Shifted-Hankel cap: value `B_k(q) <= A_k(q)`.
pub fn method2(q: &FloatPoly, k: usize) -> Result<MethodBound> {
    check_degree(q.degree(), k, true)?;
    let b = constant_b(q, k)?;
    Ok(MethodBound {
        method: 2,
        k: Some(k),
        value: b,
        exact_value_sq: None,
        certificate: capped_certificate(q, k, b * b)?,
    })
}

pub fn method1_exact(q: &ExactPoly, k: usize) -> Result<MethodBound> {
    check_degree(q.degree(), k, true)?;
    let a_sq = exact_constant_a_sq(q, k)?;
    Ok(MethodBound {
        method: 1,
        k: Some(k),
        value: rat_to_f64(&a_sq).sqrt(),
        exact_value_sq: Some(a_sq.clone()),
        certificate: capped_certificate_exact(q, k, &a_sq)?,
    })
}

pub fn method2_exact(q: &ExactPoly, k: usize) -> Result<MethodBound> {
    check_degree(q.degree(), k, true)?;
    let b_sq = exact_constant_b_sq(q, k)?;
    Ok(MethodBound {
        method: 2,
        k: Some(k),
        value: rat_to_f64(&b_sq).sqrt(),
        exact_value_sq: Some(b_sq.clone()),
        certificate: capped_certificate_exact(q, k, &b_sq)?,
    })
}

/// Telescoping restricted-shift bound: value `||q||_2 * prod_k C_k(q)`.
pub fn method3(q: &FloatPoly) -> Result<MethodBound> {
    let n = check_degree(q.degree(), 0, false)?;
    let c: Vec<f64> = (0..n).map(|k| constant_c(q, k)).collect::<Result<_>>()?;
    // suffix products of C_j^2 from level j upward
    let mut blocks = Vec::with_capacity(n + 1);
    for j in 0..n {
        let factor: f64 = c[j..n].iter().map(|x| x * x).product();
        blocks.push(gamma_star_gamma(q, j)?.scale(&Complex64::new(factor, 0.0)));
    }
    blocks.push(gamma_star_gamma(q, n)?);
    let value = q.l2_norm() * c.iter().product::<f64>();
    Ok(MethodBound {
        method: 3,
        k: None,
        value,
        exact_value_sq: None,
        certificate: GradedOperator::from_float(q.d(), n as u32, blocks)?,
    })
}

pub fn method3_exact(q: &ExactPoly) -> Result<MethodBound> {
    let n = check_degree(q.degree(), 0, false)?;
    let c_sq: Vec<Rat> = (0..n)
        .map(|k| exact_constant_c_sq(q, k))
        .collect::<Result<_>>()?;
    let mut blocks = Vec::with_capacity(n + 1);
    for j in 0..n {
        let mut factor = Rat::new(1.into(), 1.into());
        for x in &c_sq[j..n] {
            factor *= x.clone();
        }
        blocks.push(gamma_star_gamma(q, j)?.scale(&GaussRat::from_rat(factor)));
    }
    blocks.push(gamma_star_gamma(q, n)?);
    let mut value_sq = q.l2_norm_sq_rat();
    for x in &c_sq {
        value_sq *= x.clone();
    }
    Ok(MethodBound {
        method: 3,
        k: None,
        value: rat_to_f64(&value_sq).sqrt(),
        exact_value_sq: Some(value_sq),
        certificate: GradedOperator::from_exact(q.d(), n as u32, blocks)?,
    })
}

/// Hybrid of methods 2 and 3: value `B_k(q) C_{k+1}(q) ... C_{n-1}(q)`.
pub fn method4(q: &FloatPoly, k: usize) -> Result<MethodBound> {
    let n = check_degree(q.degree(), k, true)?;
    let b = constant_b(q, k)?;
    let c: Vec<f64> = (k + 1..n)
        .map(|j| constant_c(q, j))
        .collect::<Result<_>>()?;
    let c_tail_sq = |j: usize| -> f64 { c[j - k - 1..].iter().map(|x| x * x).product() };
    let mut blocks = Vec::with_capacity(n + 1);
    let low_cap = b * b * c_tail_sq(k + 1);
    for j in 0..=k {
        blocks.push(
            Mat::<Complex64>::identity(dim_homog(q.d(), j)).scale(&Complex64::new(low_cap, 0.0)),
        );
    }
    for j in k + 1..n {
        blocks.push(gamma_star_gamma(q, j)?.scale(&Complex64::new(c_tail_sq(j), 0.0)));
    }
    blocks.push(gamma_star_gamma(q, n)?);
    let value = b * c.iter().product::<f64>();
    Ok(MethodBound {
        method: 4,
        k: Some(k),
        value,
        exact_value_sq: None,
        certificate: GradedOperator::from_float(q.d(), n as u32, blocks)?,
    })
}

pub fn method4_exact(q: &ExactPoly, k: usize) -> Result<MethodBound> {
    let n = check_degree(q.degree(), k, true)?;
    let b_sq = exact_constant_b_sq(q, k)?;
    let c_sq: Vec<Rat> = (k + 1..n)
        .map(|j| exact_constant_c_sq(q, j))
        .collect::<Result<_>>()?;
    let c_tail = |j: usize| -> Rat {
        let mut f = Rat::new(1.into(), 1.into());
        for x in &c_sq[j - k - 1..] {
            f *= x.clone();
        }
        f
    };
    let mut blocks = Vec::with_capacity(n + 1);
    let low_cap = b_sq.clone() * c_tail(k + 1);
    for j in 0..=k {
        blocks.push(
            RatMat::identity(dim_homog(q.d(), j)).scale(&GaussRat::from_rat(low_cap.clone())),
        );
    }
    for j in k + 1..n {
        blocks.push(gamma_star_gamma(q, j)?.scale(&GaussRat::from_rat(c_tail(j))));
    }
    blocks.push(gamma_star_gamma(q, n)?);
    let value_sq = low_cap;
    Ok(MethodBound {
        method: 4,
        k: Some(k),
        value: rat_to_f64(&value_sq).sqrt(),
        exact_value_sq: Some(value_sq),
        certificate: GradedOperator::from_exact(q.d(), n as u32, blocks)?,
    })
}

/// Verifies a caller-supplied weight chain `E_0 = I`,
/// `M_i E_k M_i^* restricted to the Hankel range <= E_{k+1}`, and on success
/// returns the bound `sqrt(<E_n q-hat, q-hat>)` with its certificate
/// `L = sum_k Gamma^* E_{n-k} Gamma|_{P_k}`.
pub fn method5_verify(q: &FloatPoly, e: &[Mat<Complex64>], tol: f64) -> Result<MethodBound> {
    let n = check_degree(q.degree(), 0, false)?;
    if e.len() != n + 1 {
        return Err(Error::Dimension(format!(
            "expected {} weight matrices, got {}",
            n + 1,
            e.len()
        )));
    }
    for (k, ek) in e.iter().enumerate() {
        let want = dim_homog(q.d(), k);
        if ek.nrows() != want || ek.ncols() != want {
            return Err(Error::Dimension(format!(
                "E_{k} is {}x{}, want {want}",
                ek.nrows(),
                ek.ncols()
            )));
        }
        if !ek.is_hermitian_tol(tol * (1.0 + ek.max_abs())) {
            return Err(Error::NonHermitian(format!("E_{k}")));
        }
    }
    if (e[0][(0, 0)] - Complex64::ONE).norm() > tol {
        return Err(Error::Verification(format!(
            "E_0 must be the identity; got {}",
            e[0][(0, 0)]
        )));
    }
    let qhat = q.hat();
    for k in 0..n {
        // range of the Hankel block into P_{k+1}
        let h = hankel_matrix(&qhat, n - k - 1)?.mat;
        let range = h.column_space_orthonormal(RANK_TOL);
        if range.ncols() == 0 {
            continue;
        }
        for var in 1..=q.d() {
            let s = shift_matrix(q.d(), k, var)?;
            // scatter E_k through the shift: (S E S^T)[a + e_i, b + e_i] = E[a, b]
            let dim_hi = dim_homog(q.d(), k + 1);
            let mut scattered = Mat::<Complex64>::zeros(dim_hi, dim_hi);
            for a in 0..e[k].nrows() {
                for b in 0..e[k].ncols() {
                    scattered[(s.row_for_col(a), s.row_for_col(b))] = e[k][(a, b)];
                }
            }
            let diff = e[k + 1].sub(&scattered);
            let restricted = range.adjoint().matmul(&diff).matmul(&range);
            let min_eig = restricted
                .hermitian_eigenvalues()
                .first()
                .copied()
                .unwrap_or(0.0);
            if min_eig < -tol * (1.0 + e[k + 1].max_abs()) {
                return Err(Error::Verification(format!(
                    "weight chain violated at (k={k}, i={var}): eigenvalue deficit {min_eig:.3e}"
                )));
            }
        }
    }
    let basis = crate::poly::BasisOrder::new(q.d(), n);
    let qhv = qhat.coeff_vec(&basis);
    let en_q = e[n].apply(&qhv);
    let quad: Complex64 = en_q.iter().zip(&qhv).map(|(a, b)| a * b.conj()).sum();
    let value = quad.re.max(0.0).sqrt();

    let mut blocks = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let h = hankel_matrix(&qhat, k)?.mat;
        blocks.push(h.adjoint().matmul(&e[n - k]).matmul(&h));
    }
    Ok(MethodBound {
        method: 5,
        k: None,
        value,
        exact_value_sq: None,
        certificate: GradedOperator::from_float(q.d(), n as u32, blocks)?,
    })
}

/// Minimum over methods 1-4 across all admissible cut levels.
pub fn best_bound(q: &FloatPoly) -> Result<MethodBound> {
    let n = check_degree(q.degree(), 0, false)?;
    let mut candidates = Vec::new();
    for k in 0..n {
        candidates.push(method1(q, k)?);
        candidates.push(method2(q, k)?);
        candidates.push(method4(q, k)?);
    }
    candidates.push(method3(q)?);
    candidates.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap()
            .then(a.method.cmp(&b.method))
            .then(a.k.cmp(&b.k))
    });
    Ok(candidates
        .into_iter()
        .next()
        .expect("nonempty candidate set"))
}

/// Re-verifies a bound's certificate: cone membership and the pinned top block.
pub fn verify_bound(q: &FloatPoly, bound: &MethodBound, tol: f64) -> Result<bool> {
    let mode = match bound.certificate.mode() {
        ScalarMode::Exact => CheckMode::Exact,
        ScalarMode::Float => CheckMode::Float(tol),
    };
    let member = check_cone_membership(&bound.certificate, mode)?.ok;
    let top = crate::certify::check_top_block(&bound.certificate, q, tol.max(1e-9))?;
    Ok(member && top)
}
