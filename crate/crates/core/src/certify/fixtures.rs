//! The classical counterexample fixtures with exact rational certificates,
//! expected values, and the original operator tuples for replay.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::GradedOperator;
use crate::linops::gamma_star_gamma;
use crate::mat::{Mat, RatMat};
use crate::poly::{kvh_polynomial, parse_poly, BasisOrder, ExactPoly, MultiIndex};
use crate::scalar::GaussRat;
use crate::{Error, Result};

/// One named fixture: the polynomial, the dual polynomial when distinct, the
/// exact graded certificate, expected values (rational strings), and the
/// original matrix tuple when the construction gives one.
pub struct Fixture {
    pub name: &'static str,
    pub p: ExactPoly,
    pub q: Option<ExactPoly>,
    pub l: GradedOperator,
    pub expected: BTreeMap<String, String>,
    pub tuple: Option<Vec<DMatrix<Complex64>>>,
}

pub const FIXTURE_NAMES: [&str; 4] = ["vk", "crabb_davie", "holbrook", "tto"];

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "vk" => Ok(vk()),
        "crabb_davie" | "crabb-davie" | "cd" => Ok(crabb_davie()),
        "holbrook" => Ok(holbrook()),
        "tto" => Ok(tto()),
        other => Err(Error::UnknownFixture(other.into())),
    }
}

fn kv_poly() -> ExactPoly {
    kvh_polynomial(3, GaussRat::from_int(-2))
}

fn expected(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn rank_one(q: &ExactPoly) -> RatMat {
    let basis = BasisOrder::new(q.d(), q.degree() as usize);
    let v = q.coeff_vec(&basis);
    Mat::outer(&v, &v)
}

/// `1 (x) 1 + sum z_i (x) z_i + (1/3) q (x) q` with the degree-2 polynomial
/// whose mixed coefficients are -1; certifies 27 on the coefficient pattern
/// (1,1,1,-2,-2,-2).
fn vk() -> Fixture {
    let p = kv_poly();
    let q = kvh_polynomial(3, GaussRat::from_int(-1));
    let l2 = rank_one(&q).scale(&GaussRat::from_ratio(1, 3));
    let l = GradedOperator::from_exact(3, 2, vec![RatMat::identity(1), RatMat::identity(3), l2])
        .expect("fixture blocks");
    let s3 = 1.0 / 3f64.sqrt();
    let t1 = tuple_from_cols(
        5,
        &[
            (0, &[(1, 1.0)]),
            (1, &[(4, s3)]),
            (2, &[(4, -s3)]),
            (3, &[(4, -s3)]),
        ],
    );
    let t2 = tuple_from_cols(
        5,
        &[
            (0, &[(2, 1.0)]),
            (1, &[(4, -s3)]),
            (2, &[(4, s3)]),
            (3, &[(4, -s3)]),
        ],
    );
    let t3 = tuple_from_cols(
        5,
        &[
            (0, &[(3, 1.0)]),
            (1, &[(4, -s3)]),
            (2, &[(4, -s3)]),
            (3, &[(4, s3)]),
        ],
    );
    Fixture {
        name: "vk",
        p,
        q: Some(q),
        l,
        expected: expected(&[
            ("lpp", "27"),
            ("l11", "1"),
            ("bound_sq", "27"),
            ("sup_norm", "5"),
            ("tuple_value_sq", "27"),
            ("q_dual_norm", "5/3"),
        ]),
        tuple: Some(vec![t1, t2, t3]),
    }
}

/// `P_{<=1} + sum_i (M_i^* p)(M_i^* p)^* + p (x) p` for the cubic
/// `z1 z2 z3 - z1^3 - z2^3 - z3^3`; the dual norm is exactly 1.
fn crabb_davie() -> Fixture {
    let p = parse_poly("z1 z2 z3 - z1^3 - z2^3 - z3^3", 3).expect("cubic");
    let l2 = gamma_star_gamma(&p, 2).expect("middle block");
    let l3 = rank_one(&p);
    let l =
        GradedOperator::from_exact(3, 3, vec![RatMat::identity(1), RatMat::identity(3), l2, l3])
            .expect("fixture blocks");
    let t1 = tuple_from_cols(
        8,
        &[
            (0, &[(1, 1.0)]),
            (1, &[(4, -1.0)]),
            (4, &[(7, 1.0)]),
            (2, &[(6, 1.0)]),
            (3, &[(5, 1.0)]),
        ],
    );
    let t2 = tuple_from_cols(
        8,
        &[
            (0, &[(2, 1.0)]),
            (2, &[(5, -1.0)]),
            (5, &[(7, 1.0)]),
            (1, &[(6, 1.0)]),
            (3, &[(4, 1.0)]),
        ],
    );
    let t3 = tuple_from_cols(
        8,
        &[
            (0, &[(3, 1.0)]),
            (3, &[(6, -1.0)]),
            (6, &[(7, 1.0)]),
            (1, &[(5, 1.0)]),
            (2, &[(4, 1.0)]),
        ],
    );
    Fixture {
        name: "crabb_davie",
        p: p.clone(),
        q: Some(p),
        l,
        expected: expected(&[
            ("lpp", "16"),
            ("l11", "1"),
            ("bound_sq", "16"),
            ("p_dual_norm", "1"),
            ("tuple_lower", "4"),
            ("tuple_value_sq", "16"),
        ]),
        tuple: Some(vec![t1, t2, t3]),
    }
}

/// `1 (x) 1 + sum z_i (x) z_i - (1/2) sum_{i != j} z_i (x) z_j + q (x) q`
/// with the mixed coefficient -1/2; certifies 36 on the same p as the first
/// fixture.
fn holbrook() -> Fixture {
    let p = kv_poly();
    let q = kvh_polynomial(3, GaussRat::from_ratio(-1, 2));
    let mut l1 = RatMat::identity(3);
    for r in 0..3 {
        for c in 0..3 {
            if r != c {
                l1[(r, c)] = GaussRat::from_ratio(-1, 2);
            }
        }
    }
    let l = GradedOperator::from_exact(3, 2, vec![RatMat::identity(1), l1, rank_one(&q)])
        .expect("fixture blocks");

    // basis {e, u, v, h}; the three unit vectors with pairwise product -1/2
    // live in span{u, v}
    let s = 3f64.sqrt() / 2.0;
    let t1 = tuple_from_cols(4, &[(0, &[(1, 1.0)]), (1, &[(3, 1.0)])]);
    let t2 = tuple_from_cols(
        4,
        &[(0, &[(1, -0.5), (2, s)]), (1, &[(3, -0.5)]), (2, &[(3, s)])],
    );
    let t3 = tuple_from_cols(
        4,
        &[
            (0, &[(1, -0.5), (2, -s)]),
            (1, &[(3, -0.5)]),
            (2, &[(3, -s)]),
        ],
    );
    Fixture {
        name: "holbrook",
        p,
        q: Some(q),
        l,
        expected: expected(&[
            ("lpp", "36"),
            ("l11", "1"),
            ("bound_sq", "36"),
            ("q_dual_norm", "1"),
            ("a0_sq", "15/4"),
            ("a1", "3/2"),
            ("b0_sq", "3/2"),
            ("c0_sq", "2/5"),
            ("c1_sq", "2/3"),
            ("sup_norm", "5"),
            ("tuple_value_sq", "36"),
        ]),
        tuple: Some(vec![t1, t2, t3]),
    }
}

/// The Toeplitz-truncation counterexample: a graded operator satisfying the
/// compression equalities whose Rayleigh value 144/5 exceeds the squared
/// supremum norm 25, ruling out the truncated-Toeplitz route to the supremum
/// norm.
fn tto() -> Fixture {
    let p = kv_poly();
    let q = kvh_polynomial(3, GaussRat::from_ratio(-1, 2));
    let mut l1 = RatMat::identity(3);
    for r in 0..3 {
        for c in 0..3 {
            if r != c {
                l1[(r, c)] = GaussRat::from_ratio(-1, 5);
            }
        }
    }
    let basis = BasisOrder::new(3, 2);
    let mut l2 = RatMat::zeros(6, 6);
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            l2[(i, j)] = tto_entry(a, b);
        }
    }
    let l = GradedOperator::from_exact(3, 2, vec![RatMat::identity(1), l1, l2])
        .expect("fixture blocks");
    Fixture {
        name: "tto",
        p,
        q: Some(q),
        l,
        expected: expected(&[
            ("lpp", "144/5"),
            ("l11", "1"),
            ("l2_eigenvalues", "0,0,0,3/2,3/2,3"),
            ("sup_norm", "5"),
            ("dual_scaled_rank", "2"),
        ]),
        tuple: None,
    }
}

/// Entry pattern of the 6x6 top block: 1 on the diagonal, 7/10 between
/// distinct squares, -1/5 between a square and a mixed monomial sharing its
/// variable, -4/5 when they are disjoint, -1/5 between distinct mixed
/// monomials.
fn tto_entry(a: &MultiIndex, b: &MultiIndex) -> GaussRat {
    if a == b {
        return GaussRat::from_int(1);
    }
    let square = |m: &MultiIndex| m.0.iter().position(|&e| e == 2);
    let support = |m: &MultiIndex| -> Vec<usize> {
        m.0.iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    };
    match (square(a), square(b)) {
        (Some(_), Some(_)) => GaussRat::from_ratio(7, 10),
        (Some(i), None) => {
            if support(b).contains(&i) {
                GaussRat::from_ratio(-1, 5)
            } else {
                GaussRat::from_ratio(-4, 5)
            }
        }
        (None, Some(j)) => {
            if support(a).contains(&j) {
                GaussRat::from_ratio(-1, 5)
            } else {
                GaussRat::from_ratio(-4, 5)
            }
        }
        (None, None) => GaussRat::from_ratio(-1, 5),
    }
}

/// Builds a real matrix column by column from sparse (row, value) lists.
fn tuple_from_cols(size: usize, cols: &[(usize, &[(usize, f64)])]) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(size, size);
    for (col, entries) in cols {
        for (row, val) in *entries {
            m[(*row, *col)] = Complex64::new(*val, 0.0);
        }
    }
    m
}
