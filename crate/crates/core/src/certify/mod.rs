//! Graded-operator certificates and their verification.
//!
//! A certificate is a graded operator `L = L_0 + ... + L_n` with one
//! Hermitian block per homogeneous component. Cone membership (all blocks PSD
//! and every shift compression dominated by the block below) is checkable in
//! exact rational arithmetic or in floating point; a verified certificate
//! yields the lower bound `sqrt(<L_n p, p> / <L_0 1, 1>)` on the
//! operator-tuple norm of `p` without trusting any solver output.

pub mod dixon;
pub mod fixtures;

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linops::compress;
use crate::mat::{Mat, RatMat};
use crate::poly::{dim_homog, BasisOrder, ExactPoly, FloatPoly};
use crate::scalar::{format_gauss, parse_gauss, GaussRat, Rat};
use crate::{Error, Result};

/// Scalar mode of a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    Exact,
    Float,
}

#[derive(Clone, Debug)]
enum GradedBlocks {
    Exact(Vec<RatMat>),
    Float(Vec<Mat<Complex64>>),
}

/// Block-diagonal graded operator `L_0 + ... + L_n`.
#[derive(Clone, Debug)]
pub struct GradedOperator {
    d: usize,
    n: u32,
    blocks: GradedBlocks,
}

impl GradedOperator {
    pub fn from_exact(d: usize, n: u32, blocks: Vec<RatMat>) -> Result<Self> {
        check_block_dims(d, n, blocks.iter().map(|b| (b.nrows(), b.ncols())))?;
        Ok(GradedOperator {
            d,
            n,
            blocks: GradedBlocks::Exact(blocks),
        })
    }

    pub fn from_float(d: usize, n: u32, blocks: Vec<Mat<Complex64>>) -> Result<Self> {
        check_block_dims(d, n, blocks.iter().map(|b| (b.nrows(), b.ncols())))?;
        Ok(GradedOperator {
            d,
            n,
            blocks: GradedBlocks::Float(blocks),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn mode(&self) -> ScalarMode {
        match self.blocks {
            GradedBlocks::Exact(_) => ScalarMode::Exact,
            GradedBlocks::Float(_) => ScalarMode::Float,
        }
    }

    pub fn blocks_exact(&self) -> Option<&[RatMat]> {
        match &self.blocks {
            GradedBlocks::Exact(b) => Some(b),
            GradedBlocks::Float(_) => None,
        }
    }

    pub fn block_float(&self, k: usize) -> Mat<Complex64> {
        match &self.blocks {
            GradedBlocks::Exact(b) => b[k].to_c64(),
            GradedBlocks::Float(b) => b[k].clone(),
        }
    }

    pub fn to_float(&self) -> GradedOperator {
        let blocks = (0..=self.n as usize).map(|k| self.block_float(k)).collect();
        GradedOperator {
            d: self.d,
            n: self.n,
            blocks: GradedBlocks::Float(blocks),
        }
    }

    pub fn scale_float(&self, s: f64) -> GradedOperator {
        let blocks = (0..=self.n as usize)
            .map(|k| self.block_float(k).scale(&Complex64::new(s, 0.0)))
            .collect();
        GradedOperator {
            d: self.d,
            n: self.n,
            blocks: GradedBlocks::Float(blocks),
        }
    }

    pub fn scale_exact(&self, s: &Rat) -> Result<GradedOperator> {
        let Some(blocks) = self.blocks_exact() else {
            return Err(Error::ExactUnavailable(
                "scaling a float certificate exactly".into(),
            ));
        };
        let g = GaussRat::from_rat(s.clone());
        Ok(GradedOperator {
            d: self.d,
            n: self.n,
            blocks: GradedBlocks::Exact(blocks.iter().map(|b| b.scale(&g)).collect()),
        })
    }
}

fn check_block_dims(
    d: usize,
    n: u32,
    dims: impl ExactSizeIterator<Item = (usize, usize)>,
) -> Result<()> {
    if dims.len() != n as usize + 1 {
        return Err(Error::Dimension(format!(
            "expected {} blocks for degree {n}, got {}",
            n + 1,
            dims.len()
        )));
    }
    for (k, (r, c)) in dims.enumerate() {
        let want = dim_homog(d, k);
        if r != want || c != want {
            return Err(Error::Dimension(format!(
                "block {k} is {r}x{c}, component dimension is {want}"
            )));
        }
    }
    Ok(())
}

/// Verification mode: exact rational LDL^T, or float eigenvalue floors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CheckMode {
    Exact,
    Float(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockVerdict {
    pub k: usize,
    pub psd: bool,
    /// Minimal eigenvalue in float mode.
    pub min_eig: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressionVerdict {
    pub k: usize,
    pub var: usize,
    pub ok: bool,
    pub min_eig: Option<f64>,
}

/// Outcome of a cone-membership check.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub exact: bool,
    pub blocks: Vec<BlockVerdict>,
    pub compressions: Vec<CompressionVerdict>,
    pub ok: bool,
}

/// Verifies `L_k >= 0` for all k and `L_{k-1} - M_i^* L_k M_i >= 0` for all
/// `k >= 1` and every variable.
pub fn check_cone_membership(l: &GradedOperator, mode: CheckMode) -> Result<MembershipReport> {
    match mode {
        CheckMode::Exact => check_exact(l),
        CheckMode::Float(tol) => check_float(l, tol),
    }
}

fn check_exact(l: &GradedOperator) -> Result<MembershipReport> {
    let Some(blocks) = l.blocks_exact() else {
        return Err(Error::ExactUnavailable(
            "exact membership check on a float certificate".into(),
        ));
    };
    let mut report = MembershipReport {
        exact: true,
        blocks: Vec::new(),
        compressions: Vec::new(),
        ok: true,
    };
    for (k, b) in blocks.iter().enumerate() {
        let psd = b.is_psd()?;
        report.ok &= psd;
        report.blocks.push(BlockVerdict {
            k,
            psd,
            min_eig: None,
        });
    }
    for k in 1..=l.n as usize {
        for var in 1..=l.d {
            let comp = compress(&blocks[k], l.d, k, var)?;
            let diff = blocks[k - 1].sub(&comp);
            let ok = diff.is_psd()?;
            report.ok &= ok;
            report.compressions.push(CompressionVerdict {
                k,
                var,
                ok,
                min_eig: None,
            });
        }
    }
    Ok(report)
}

fn check_float(l: &GradedOperator, tol: f64) -> Result<MembershipReport> {
    let blocks: Vec<Mat<Complex64>> = (0..=l.n as usize).map(|k| l.block_float(k)).collect();
    let mut report = MembershipReport {
        exact: false,
        blocks: Vec::new(),
        compressions: Vec::new(),
        ok: true,
    };
    let scale = blocks.iter().map(|b| b.max_abs()).fold(1.0, f64::max);
    for (k, b) in blocks.iter().enumerate() {
        if !b.is_hermitian_tol(tol * scale) {
            return Err(Error::NonHermitian(format!("block {k}")));
        }
        let min_eig = b.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
        let psd = min_eig >= -tol * scale;
        report.ok &= psd;
        report.blocks.push(BlockVerdict {
            k,
            psd,
            min_eig: Some(min_eig),
        });
    }
    for k in 1..=l.n as usize {
        for var in 1..=l.d {
            let comp = compress(&blocks[k], l.d, k, var)?;
            let diff = blocks[k - 1].sub(&comp);
            let min_eig = diff.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
            let ok = min_eig >= -tol * scale;
            report.ok &= ok;
            report.compressions.push(CompressionVerdict {
                k,
                var,
                ok,
                min_eig: Some(min_eig),
            });
        }
    }
    Ok(report)
}

/// True iff the top block equals the rank-one `q (x) q`.
pub fn check_top_block(l: &GradedOperator, q: &FloatPoly, tol: f64) -> Result<bool> {
    if q.degree() != l.n || q.d() != l.d {
        return Err(Error::Dimension(
            "top-block comparison with mismatched polynomial".into(),
        ));
    }
    let basis = BasisOrder::new(l.d, l.n as usize);
    let qv = q.coeff_vec(&basis);
    let want = Mat::outer(&qv, &qv);
    let got = l.block_float(l.n as usize);
    let scale = 1.0 + want.max_abs();
    Ok(got.sub(&want).max_abs() <= tol * scale)
}

/// Exact version of [`check_top_block`].
pub fn check_top_block_exact(l: &GradedOperator, q: &ExactPoly) -> Result<bool> {
    let Some(blocks) = l.blocks_exact() else {
        return Err(Error::ExactUnavailable(
            "exact top-block check on float certificate".into(),
        ));
    };
    if q.degree() != l.n || q.d() != l.d {
        return Err(Error::Dimension(
            "top-block comparison with mismatched polynomial".into(),
        ));
    }
    let basis = BasisOrder::new(l.d, l.n as usize);
    let qv = q.coeff_vec(&basis);
    Ok(blocks[l.n as usize] == Mat::outer(&qv, &qv))
}

/// `sqrt(<L_n p, p> / <L_0 1, 1>)` after re-verifying cone membership.
pub fn certified_sa_lower_bound(l: &GradedOperator, p: &FloatPoly, tol: f64) -> Result<f64> {
    let mode = match l.mode() {
        ScalarMode::Exact => CheckMode::Exact,
        ScalarMode::Float => CheckMode::Float(tol),
    };
    let report = check_cone_membership(l, mode)?;
    if !report.ok {
        return Err(Error::Verification("certificate is not in the cone".into()));
    }
    rayleigh_value(l, p)
}

/// The Rayleigh value of a certificate without re-verification.
pub fn rayleigh_value(l: &GradedOperator, p: &FloatPoly) -> Result<f64> {
    if p.d() != l.d || p.degree() != l.n {
        return Err(Error::Dimension("certificate/polynomial mismatch".into()));
    }
    let l0 = l.block_float(0)[(0, 0)].re;
    if l0 <= 0.0 {
        return Err(Error::Verification("certificate has <L_0 1,1> <= 0".into()));
    }
    let basis = BasisOrder::new(l.d, l.n as usize);
    let pv = p.coeff_vec(&basis);
    let ln = l.block_float(l.n as usize);
    let mut quad = Complex64::ZERO;
    for r in 0..pv.len() {
        for c in 0..pv.len() {
            quad += pv[r].conj() * ln[(r, c)] * pv[c];
        }
    }
    Ok((quad.re.max(0.0) / l0).sqrt())
}

/// Exact squared bound `<L_n p, p> / <L_0 1, 1>` for rational data.
pub fn certified_sa_lower_bound_sq_exact(l: &GradedOperator, p: &ExactPoly) -> Result<Rat> {
    let Some(blocks) = l.blocks_exact() else {
        return Err(Error::ExactUnavailable(
            "exact bound on float certificate".into(),
        ));
    };
    let report = check_cone_membership(l, CheckMode::Exact)?;
    if !report.ok {
        return Err(Error::Verification("certificate is not in the cone".into()));
    }
    if p.d() != l.d || p.degree() != l.n {
        return Err(Error::Dimension("certificate/polynomial mismatch".into()));
    }
    let l0 = blocks[0][(0, 0)].clone();
    if !l0.is_real() || !l0.re.is_positive() {
        return Err(Error::Verification("certificate has <L_0 1,1> <= 0".into()));
    }
    let basis = BasisOrder::new(l.d, l.n as usize);
    let pv = p.coeff_vec(&basis);
    let ln = &blocks[l.n as usize];
    let mut quad = GaussRat::zero();
    for r in 0..pv.len() {
        for c in 0..pv.len() {
            quad += pv[r].conj() * ln[(r, c)].clone() * pv[c].clone();
        }
    }
    if !quad.is_real() {
        return Err(Error::Verification(
            "quadratic form value is not real".into(),
        ));
    }
    Ok(quad.re / l0.re)
}

/// Exact PSD test for a rational Hermitian matrix.
pub fn rational_psd(m: &RatMat) -> Result<bool> {
    m.is_psd()
}

// -- serialization ------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BlockJson {
    k: usize,
    entries: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Default, Clone, Debug)]
pub struct CertificateMeta {
    pub source: String,
    #[serde(default)]
    pub claims: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    d: usize,
    n: u32,
    mode: String,
    blocks: Vec<BlockJson>,
    meta: CertificateMeta,
}

fn format_c64(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_c64(s: &str) -> Result<Complex64> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad float scalar {t:?}"));
    if let Some(body) = t.strip_suffix('i') {
        // the split must skip the leading sign and any exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for pos in (1..bytes.len()).rev() {
            let c = bytes[pos] as char;
            if (c == '+' || c == '-') && !bytes[pos - 1].eq_ignore_ascii_case(&b'e') {
                split = Some(pos);
                break;
            }
        }
        return match split {
            Some(pos) => {
                let re: f64 = body[..pos].parse().map_err(|_| bad())?;
                let imtxt = &body[pos..];
                let im: f64 = if imtxt == "+" {
                    1.0
                } else if imtxt == "-" {
                    -1.0
                } else {
                    imtxt.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        };
    }
    Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
}

impl GradedOperator {
    pub fn to_json(&self, meta: &CertificateMeta) -> String {
        let blocks = (0..=self.n as usize)
            .map(|k| {
                let entries = match &self.blocks {
                    GradedBlocks::Exact(bs) => {
                        let b = &bs[k];
                        (0..b.nrows())
                            .map(|r| (0..b.ncols()).map(|c| format_gauss(&b[(r, c)])).collect())
                            .collect()
                    }
                    GradedBlocks::Float(bs) => {
                        let b = &bs[k];
                        (0..b.nrows())
                            .map(|r| (0..b.ncols()).map(|c| format_c64(b[(r, c)])).collect())
                            .collect()
                    }
                };
                BlockJson { k, entries }
            })
            .collect();
        let doc = CertificateJson {
            d: self.d,
            n: self.n,
            mode: match self.mode() {
                ScalarMode::Exact => "exact".into(),
                ScalarMode::Float => "float".into(),
            },
            blocks,
            meta: meta.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("certificate json")
    }

    pub fn from_json(text: &str) -> Result<(GradedOperator, CertificateMeta)> {
        let doc: CertificateJson = serde_json::from_str(text)?;
        let mut sorted = doc.blocks;
        sorted.sort_by_key(|b| b.k);
        let block_dims = |entries: &Vec<Vec<String>>| -> (usize, usize) {
            (entries.len(), entries.first().map_or(0, |r| r.len()))
        };
        let op = match doc.mode.as_str() {
            "exact" => {
                let mut blocks = Vec::new();
                for b in &sorted {
                    let (nr, nc) = block_dims(&b.entries);
                    let mut m = RatMat::zeros(nr, nc);
                    for (r, row) in b.entries.iter().enumerate() {
                        for (c, s) in row.iter().enumerate() {
                            m[(r, c)] = parse_gauss(s)?;
                        }
                    }
                    blocks.push(m);
                }
                GradedOperator::from_exact(doc.d, doc.n, blocks)?
            }
            "float" => {
                let mut blocks = Vec::new();
                for b in &sorted {
                    let (nr, nc) = block_dims(&b.entries);
                    let mut m = Mat::<Complex64>::zeros(nr, nc);
                    for (r, row) in b.entries.iter().enumerate() {
                        for (c, s) in row.iter().enumerate() {
                            m[(r, c)] = parse_c64(s)?;
                        }
                    }
                    blocks.push(m);
                }
                GradedOperator::from_float(doc.d, doc.n, blocks)?
            }
            other => return Err(Error::Parse(format!("unknown certificate mode {other:?}"))),
        };
        Ok((op, doc.meta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{exact_poly, kvh_polynomial};
    use num_traits::One;

    fn identity_chain(d: usize, n: u32, scales: &[i64]) -> GradedOperator {
        let blocks = (0..=n as usize)
            .map(|k| RatMat::identity(dim_homog(d, k)).scale(&GaussRat::from_int(scales[k])))
            .collect();
        GradedOperator::from_exact(d, n, blocks).unwrap()
    }

    #[test]
    fn identity_chain_membership() {
        // decreasing scalars satisfy the compression inequalities
        let good = identity_chain(2, 1, &[2, 1]);
        assert!(check_cone_membership(&good, CheckMode::Exact).unwrap().ok);
        assert!(
            check_cone_membership(&good, CheckMode::Float(1e-10))
                .unwrap()
                .ok
        );
        // increasing scalars violate compression at k = 1
        let bad = identity_chain(2, 1, &[1, 2]);
        let report = check_cone_membership(&bad, CheckMode::Exact).unwrap();
        assert!(!report.ok);
        assert!(report.blocks.iter().all(|b| b.psd));
        assert!(report.compressions.iter().any(|c| !c.ok && c.k == 1));
    }

    #[test]
    fn rank_one_chain_bound() {
        // L = 1 (x) 1 + sum z_i (x) z_i + (1/3) q (x) q certifies 27 on the
        // quadratic with coefficients (1,1,1,-2,-2,-2)
        let q = kvh_polynomial(3, GaussRat::from_int(-1));
        let basis = BasisOrder::new(3, 2);
        let qv = q.coeff_vec(&basis);
        let l2 = Mat::outer(&qv, &qv).scale(&GaussRat::from_ratio(1, 3));
        let l =
            GradedOperator::from_exact(3, 2, vec![RatMat::identity(1), RatMat::identity(3), l2])
                .unwrap();
        let p = kvh_polynomial(3, GaussRat::from_int(-2));
        let b2 = certified_sa_lower_bound_sq_exact(&l, &p).unwrap();
        assert_eq!(b2, Rat::from_integer(27.into()));
        let f = certified_sa_lower_bound(&l.to_float(), &p.to_float(), 1e-9).unwrap();
        assert!((f - 27f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn top_block_check() {
        let q = exact_poly(2, &[("1", &[1, 1]), ("-2", &[2, 0])]);
        let basis = BasisOrder::new(2, 2);
        let qv = q.coeff_vec(&basis);
        let top = Mat::outer(&qv, &qv);
        let l = GradedOperator::from_exact(
            2,
            2,
            vec![
                RatMat::identity(1).scale(&GaussRat::from_int(5)),
                RatMat::identity(2).scale(&GaussRat::from_int(5)),
                top.clone(),
            ],
        )
        .unwrap();
        assert!(check_top_block_exact(&l, &q).unwrap());
        assert!(check_top_block(&l, &q.to_float(), 1e-10).unwrap());
        let l2 = GradedOperator::from_exact(
            2,
            2,
            vec![
                RatMat::identity(1),
                RatMat::identity(2),
                top.scale(&GaussRat::from_int(2)),
            ],
        )
        .unwrap();
        assert!(!check_top_block_exact(&l2, &q).unwrap());
    }

    #[test]
    fn json_roundtrip_exact_and_float() {
        let l = identity_chain(2, 1, &[3, 1]);
        let meta = CertificateMeta {
            source: "test".into(),
            claims: Default::default(),
        };
        let text = l.to_json(&meta);
        let (back, meta2) = GradedOperator::from_json(&text).unwrap();
        assert_eq!(meta2.source, "test");
        assert_eq!(
            back.blocks_exact().unwrap()[0][(0, 0)],
            GaussRat::from_int(3)
        );
        assert_eq!(
            back.blocks_exact().unwrap()[1],
            l.blocks_exact().unwrap()[1]
        );

        let lf = l.to_float();
        let textf = lf.to_json(&meta);
        let (backf, _) = GradedOperator::from_json(&textf).unwrap();
        assert!(backf.block_float(0).sub(&lf.block_float(0)).max_abs() == 0.0);
    }

    #[test]
    fn float_scalar_roundtrip_via_strings() {
        for z in [
            Complex64::new(0.1 + 0.2, -3.5e-9),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.25e-17, -2.0),
        ] {
            let s = format_c64(z);
            let back = parse_c64(&s).unwrap();
            assert_eq!(z, back, "{s}");
        }
        assert_eq!(GaussRat::one(), parse_gauss("1").unwrap());
    }
}
