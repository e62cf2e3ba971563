//! Multi-index and homogeneous-polynomial algebra.
//!
//! Monomials are ordered graded-lexicographically with `z1^k` first within a
//! degree; this single order fixes every matrix representation in the crate.

mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalar::{format_gauss, parse_gauss, rat_to_f64, GaussRat, Rat, Scalar};
use crate::{Error, Result};

pub use parse::{parse_any, parse_poly};

/// Exponent vector of a monomial in `d` variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// Unit vector `e_var`, with `var` numbered from 1 (matching `z1..zd`).
    pub fn unit(d: usize, var: usize) -> Self {
        let mut e = vec![0; d];
        e[var - 1] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Adds 1 to variable `var` (1-based).
    pub fn bump(&self, var: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[var - 1] += 1;
        MultiIndex(e)
    }

    /// Componentwise difference if `other <= self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(MultiIndex(out))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            // within a degree: z1-heavy monomials first
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Dimension of the space of degree-`k` homogeneous polynomials in `d` variables.
pub fn dim_homog(d: usize, k: usize) -> usize {
    binom(k + d - 1, d - 1)
}

/// The ordered monomial basis of the degree-`k` homogeneous polynomials.
#[derive(Clone, Debug)]
pub struct BasisOrder {
    pub d: usize,
    pub k: usize,
    list: Vec<MultiIndex>,
    index: std::collections::HashMap<MultiIndex, usize>,
}

impl BasisOrder {
    pub fn new(d: usize, k: usize) -> Self {
        assert!(d >= 1, "need at least one variable");
        let mut list = Vec::with_capacity(dim_homog(d, k));
        let mut current = vec![0u32; d];
        fn rec(list: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
            if pos + 1 == current.len() {
                current[pos] = remaining;
                list.push(MultiIndex(current.clone()));
                current[pos] = 0;
                return;
            }
            for e in (0..=remaining).rev() {
                current[pos] = e;
                rec(list, current, pos + 1, remaining - e);
            }
            current[pos] = 0;
        }
        rec(&mut list, &mut current, 0, k as u32);
        let index = list
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        BasisOrder { d, k, list, index }
    }

    pub fn dim(&self) -> usize {
        self.list.len()
    }

    pub fn monomial(&self, i: usize) -> &MultiIndex {
        &self.list[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.list.iter()
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Degree-`n` homogeneous polynomial in `d` variables with sparse coefficients.
#[derive(Clone, PartialEq)]
pub struct HomogeneousPolynomial<S> {
    d: usize,
    n: u32,
    coeffs: BTreeMap<MultiIndex, S>,
}

pub type ExactPoly = HomogeneousPolynomial<GaussRat>;
pub type FloatPoly = HomogeneousPolynomial<Complex64>;

impl<S: Scalar> HomogeneousPolynomial<S> {
    pub fn zero(d: usize, n: u32) -> Self {
        HomogeneousPolynomial {
            d,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        d: usize,
        n: u32,
        terms: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut p = Self::zero(d, n);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: MultiIndex, c: S) -> Result<()> {
        if m.len() != self.d {
            return Err(Error::Dimension(format!(
                "multi-index has {} entries, polynomial has {} variables",
                m.len(),
                self.d
            )));
        }
        if m.degree() != self.n {
            return Err(Error::MixedDegree(format!(
                "term of degree {} in a degree-{} polynomial",
                m.degree(),
                self.n
            )));
        }
        if c.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> S {
        self.coeffs.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    /// Hardy pairing `<p, q> = sum_g c_g(p) conj(c_g(q))`.
    pub fn inner_product(&self, q: &Self) -> Result<S> {
        if self.d != q.d || self.n != q.n {
            return Err(Error::Dimension(format!(
                "pairing (d={}, n={}) with (d={}, n={})",
                self.d, self.n, q.d, q.n
            )));
        }
        let mut acc = S::zero();
        for (m, c) in &self.coeffs {
            if let Some(cq) = q.coeffs.get(m) {
                acc += c.clone() * cq.conj();
            }
        }
        Ok(acc)
    }

    /// Coefficient-wise conjugation; an involution.
    pub fn hat(&self) -> Self {
        HomogeneousPolynomial {
            d: self.d,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.d, self.n);
        for (m, c) in &self.coeffs {
            let sc = s.clone() * c.clone();
            if !sc.is_zero() {
                out.coeffs.insert(m.clone(), sc);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (m, c) in &rhs.coeffs {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        HomogeneousPolynomial {
            d: self.d,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::Dimension(
                "product of polynomials in different variable counts".into(),
            ));
        }
        let mut out = Self::zero(self.d, self.n + rhs.n);
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &rhs.coeffs {
                out.add_term(ma.add(mb), ca.clone() * cb.clone())?;
            }
        }
        Ok(out)
    }

    /// Squared Hardy norm as a scalar.
    pub fn norm_sq(&self) -> S {
        self.inner_product(self).expect("self pairing")
    }

    pub fn to_float(&self) -> FloatPoly {
        HomogeneousPolynomial {
            d: self.d,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m.clone(), c.to_c64()))
                .collect(),
        }
    }

    /// Coefficient column in the given basis order.
    pub fn coeff_vec(&self, basis: &BasisOrder) -> Vec<S> {
        assert_eq!(basis.d, self.d);
        assert_eq!(basis.k as u32, self.n);
        basis.iter().map(|m| self.coeff(m)).collect()
    }

    /// `M_{z^g}^* p`: drops every term not divisible by `z^g` and shifts the rest down.
    pub fn shift_down(&self, g: &MultiIndex) -> Result<Self> {
        if g.len() != self.d {
            return Err(Error::Dimension("shift_down index length".into()));
        }
        if g.degree() > self.n {
            return Err(Error::IndexOutOfRange(format!(
                "shift_down by degree {} exceeds polynomial degree {}",
                g.degree(),
                self.n
            )));
        }
        let mut out = Self::zero(self.d, self.n - g.degree());
        for (m, c) in &self.coeffs {
            if let Some(rest) = m.checked_sub(g) {
                out.add_term(rest, c.clone())?;
            }
        }
        Ok(out)
    }

    /// Point evaluation.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.d);
        let mut acc = Complex64::ZERO;
        for (m, c) in &self.coeffs {
            let mut t = c.to_c64();
            for (zi, &e) in z.iter().zip(&m.0) {
                t *= zi.powu(e);
            }
            acc += t;
        }
        acc
    }
}

impl FloatPoly {
    pub fn l2_norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn has_imag(&self) -> bool {
        self.coeffs.values().any(|c| c.im != 0.0)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Complex partial derivative dp/dz_var (1-based var).
    pub fn partial(&self, var: usize) -> FloatPoly {
        let mut out = FloatPoly::zero(self.d, self.n.saturating_sub(1));
        if self.n == 0 {
            return out;
        }
        for (m, c) in &self.coeffs {
            let e = m.0[var - 1];
            if e == 0 {
                continue;
            }
            let mut idx = m.0.clone();
            idx[var - 1] -= 1;
            out.add_term(MultiIndex(idx), c * e as f64)
                .expect("derivative term");
        }
        out
    }
}

impl ExactPoly {
    pub fn l2_norm_sq_rat(&self) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.values() {
            acc += c.abs_sq();
        }
        acc
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(|c| c.is_real())
    }
}

impl<S: Scalar> fmt::Display for HomogeneousPolynomial<S> {
    /// Grammar-compatible rendering; complex coefficients split into a real
    /// and an imaginary term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.coeffs {
            let z = c.to_c64();
            for (val, imag) in [(z.re, false), (z.im, true)] {
                if val == 0.0 {
                    continue;
                }
                let sign = if val < 0.0 { "-" } else { "+" };
                if first {
                    if val < 0.0 {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                first = false;
                let a = val.abs();
                let monomial = format_monomial(m);
                let need_coeff = a != 1.0 || imag || monomial.is_empty();
                if need_coeff {
                    write!(f, "{a}")?;
                    if imag {
                        write!(f, "i")?;
                    }
                    if !monomial.is_empty() {
                        write!(f, " ")?;
                    }
                }
                write!(f, "{monomial}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| format!("({}) {}", format_gauss(c), format_monomial(m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FloatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn format_monomial(m: &MultiIndex) -> String {
    let mut s = String::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(&format!("z{}", i + 1));
        if e > 1 {
            s.push_str(&format!("^{e}"));
        }
    }
    s
}

/// General (not necessarily homogeneous) polynomial; the homogenization input.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<S> {
    pub d: usize,
    pub coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(d: usize) -> Self {
        Polynomial {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, m: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.coeffs.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(first) => degs.all(|d| d == first),
        }
    }

    pub fn into_homogeneous(self) -> Result<HomogeneousPolynomial<S>> {
        if !self.is_homogeneous() {
            let degs: std::collections::BTreeSet<u32> =
                self.coeffs.keys().map(|m| m.degree()).collect();
            return Err(Error::MixedDegree(format!("degrees present: {degs:?}")));
        }
        let n = self.degree();
        HomogeneousPolynomial::from_terms(self.d, n, self.coeffs)
    }

    /// Multiplies each degree-m term by `z0^(n-m)` where `z0` is a new first
    /// variable; the result is homogeneous of degree `n` in `d+1` variables.
    pub fn homogenize(&self, n: u32) -> Result<HomogeneousPolynomial<S>> {
        if self.degree() > n {
            return Err(Error::IndexOutOfRange(format!(
                "homogenize to degree {} below polynomial degree {}",
                n,
                self.degree()
            )));
        }
        let mut out = HomogeneousPolynomial::zero(self.d + 1, n);
        for (m, c) in &self.coeffs {
            let mut e = Vec::with_capacity(self.d + 1);
            e.push(n - m.degree());
            e.extend_from_slice(&m.0);
            out.add_term(MultiIndex(e), c.clone())?;
        }
        Ok(out)
    }

    /// Substitutes 1 for the first variable, undoing [`Polynomial::homogenize`].
    pub fn dehomogenize(p: &HomogeneousPolynomial<S>) -> Polynomial<S> {
        let mut out = Polynomial::zero(p.d() - 1);
        for (m, c) in p.terms() {
            out.add_term(MultiIndex(m.0[1..].to_vec()), c.clone());
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (m, c) in &self.coeffs {
            let mut t = c.to_c64();
            for (zi, &e) in z.iter().zip(&m.0) {
                t *= zi.powu(e);
            }
            acc += t;
        }
        acc
    }
}

/// The degree-2 family `sum_i z_i^2 + (t/2) sum_{i != j} z_i z_j`.
pub fn kvh_polynomial<S: Scalar>(d: usize, t: S) -> HomogeneousPolynomial<S> {
    assert!(d >= 1);
    let mut p = HomogeneousPolynomial::zero(d, 2);
    for i in 1..=d {
        let mut e = vec![0; d];
        e[i - 1] = 2;
        p.add_term(MultiIndex(e), S::one()).unwrap();
    }
    for i in 1..=d {
        for j in i + 1..=d {
            let mut e = vec![0; d];
            e[i - 1] = 1;
            e[j - 1] = 1;
            p.add_term(MultiIndex(e), t.clone()).unwrap();
        }
    }
    p
}

/// All-ones coefficient vector over the degree-`n` monomials.
pub fn kernel_polynomial<S: Scalar>(d: usize, n: u32) -> HomogeneousPolynomial<S> {
    let basis = BasisOrder::new(d, n as usize);
    let mut p = HomogeneousPolynomial::zero(d, n);
    for m in basis.iter() {
        p.add_term(m.clone(), S::one()).unwrap();
    }
    p
}

/// Closed forms for the degree-2 family: `(sa, dual)`.
pub fn closed_form_kvh(d: usize, t: Complex64) -> (f64, f64) {
    assert!(d >= 1);
    let df = d as f64;
    let one = Complex64::ONE;
    let sa = df * f64::max((one - t / 2.0).norm(), (one + t * (df - 1.0) / 2.0).norm());
    let dual = ((df - 1.0) * (t - one).norm() + ((df - 1.0) * t + one).norm()) / df;
    (sa, dual)
}

// -- JSON form ---------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    alpha: Vec<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    d: usize,
    n: u32,
    coeffs: Vec<CoeffJson>,
}

impl ExactPoly {
    pub fn to_json(&self) -> String {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, c)| CoeffJson {
                alpha: m.0.clone(),
                re: crate::scalar::format_rat(&c.re),
                im: crate::scalar::format_rat(&c.im),
            })
            .collect();
        serde_json::to_string(&PolyJson {
            d: self.d,
            n: self.n,
            coeffs,
        })
        .expect("poly json")
    }

    pub fn from_json(text: &str) -> Result<ExactPoly> {
        let pj: PolyJson = serde_json::from_str(text)?;
        let mut p = ExactPoly::zero(pj.d, pj.n);
        for c in pj.coeffs {
            let g = GaussRat::new(
                crate::scalar::parse_rat(&c.re)?,
                crate::scalar::parse_rat(&c.im)?,
            );
            p.add_term(MultiIndex(c.alpha), g)?;
        }
        Ok(p)
    }
}

impl FloatPoly {
    pub fn to_json(&self) -> String {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, c)| CoeffJson {
                alpha: m.0.clone(),
                re: format!("{}", c.re),
                im: format!("{}", c.im),
            })
            .collect();
        serde_json::to_string(&PolyJson {
            d: self.d,
            n: self.n,
            coeffs,
        })
        .expect("poly json")
    }
}

/// Convenience constructor used in tests and fixtures: terms given as
/// (coefficient string, exponent vector).
pub fn exact_poly(d: usize, terms: &[(&str, &[u32])]) -> ExactPoly {
    let n = terms
        .first()
        .map(|(_, e)| e.iter().sum::<u32>())
        .unwrap_or(0);
    let mut p = ExactPoly::zero(d, n);
    for (c, e) in terms {
        p.add_term(MultiIndex(e.to_vec()), parse_gauss(c).expect("coefficient"))
            .expect("term");
    }
    p
}

pub fn rat_f64(r: &Rat) -> f64 {
    rat_to_f64(r)
}
