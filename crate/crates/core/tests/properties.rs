//! Property suites: parser round-trips, pairing axioms, exact/float
//! agreement of the PSD test, Hankel norm chains, the homogenization
//! inequality, and solver self-duality.

use aglerkit::certify::rational_psd;
use aglerkit::linops;
use aglerkit::mat::RatMat;
use aglerkit::norms;
use aglerkit::poly::{exact_poly, parse_poly, ExactPoly, MultiIndex, Polynomial};
use aglerkit::scalar::{GaussRat, Rat};
use aglerkit::sdp;
use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_gauss() -> impl Strategy<Value = GaussRat> {
    (-20i64..=20, 1i64..=6, -20i64..=20, 1i64..=6).prop_map(|(a, b, c, d)| {
        GaussRat::new(Rat::new(a.into(), b.into()), Rat::new(c.into(), d.into()))
    })
}

fn arb_poly(d: usize, n: u32) -> impl Strategy<Value = ExactPoly> {
    let basis = aglerkit::poly::BasisOrder::new(d, n as usize);
    let monos: Vec<MultiIndex> = basis.iter().cloned().collect();
    proptest::collection::vec(arb_gauss(), monos.len()).prop_map(move |coeffs| {
        let mut p = ExactPoly::zero(d, n);
        for (m, c) in monos.iter().zip(coeffs) {
            p.add_term(m.clone(), c).unwrap();
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_format_roundtrip(p in arb_poly(3, 2)) {
        let shown = p.to_float().to_string();
        let back = parse_poly(&shown, 3).unwrap();
        // display goes through floats; coefficients here are small rationals
        // with denominators 1..6, all exactly representable pairs, so the
        // round-trip matches to double precision
        for (m, c) in p.terms() {
            let diff = back.coeff(m).to_c64() - c.to_c64();
            prop_assert!(diff.norm() < 1e-12, "{shown}");
        }
    }

    #[test]
    fn pairing_is_sesquilinear_and_positive(
        p in arb_poly(2, 3),
        q in arb_poly(2, 3),
        r in arb_poly(2, 3),
        s in arb_gauss(),
    ) {
        // <p + s q, r> = <p, r> + s <q, r>
        let lhs = p.add(&q.scale(&s)).unwrap().inner_product(&r).unwrap();
        let rhs = p.inner_product(&r).unwrap() + s.clone() * q.inner_product(&r).unwrap();
        prop_assert_eq!(lhs, rhs);
        // <r, p + s q> = <r, p> + conj(s) <r, q>
        let lhs = r.inner_product(&p.add(&q.scale(&s)).unwrap()).unwrap();
        let rhs = r.inner_product(&p).unwrap() + s.conj() * r.inner_product(&q).unwrap();
        prop_assert_eq!(lhs, rhs);
        // positivity, zero only at zero
        let pp = p.inner_product(&p).unwrap();
        prop_assert!(pp.is_real());
        prop_assert!(pp.re >= Rat::zero());
        prop_assert_eq!(pp.re.is_zero(), p.is_zero());
    }

    #[test]
    fn hat_is_an_involution(p in arb_poly(3, 3)) {
        prop_assert_eq!(p.hat().hat(), p);
    }
}

#[test]
fn rational_psd_matches_float_eigenvalues_on_1000_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x95D_7E57);
    let mut decided = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v =
                    GaussRat::from_ratio(rng.random_range(-12i64..=12), rng.random_range(1i64..=4));
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        let exact = rational_psd(&m).unwrap();
        let eigs = m.to_c64().hermitian_eigenvalues();
        let min = eigs.first().copied().unwrap_or(0.0);
        // only compare when the float sign is unambiguous
        if min.abs() > 1e-8 {
            decided += 1;
            assert_eq!(exact, min > 0.0, "n={n} min_eig={min}");
        }
    }
    assert!(decided > 900, "degenerate sample: only {decided} decided");
}

#[test]
fn shifted_hankel_norms_are_dominated_by_the_next_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let d = rng.random_range(2..=3);
        let n = rng.random_range(2..=4u32);
        let q = norms::random_poly(d, n, &mut rng);
        for k in 0..(n as usize - 1) {
            let b = linops::constant_b(&q, k).unwrap();
            let a_next = linops::constant_a(&q, k + 1).unwrap();
            assert!(b <= a_next + 1e-10, "B_{k} = {b} > A_{} = {a_next}", k + 1);
        }
    }
}

#[test]
fn homogenization_dominates_polydisc_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..5 {
        // random non-homogeneous polynomial in one or two variables
        let d = rng.random_range(1..=2usize);
        let mut p = Polynomial::<GaussRat>::zero(d);
        let deg = 2u32;
        for _ in 0..4 {
            let mut e = vec![0u32; d];
            let mut left = rng.random_range(0..=deg);
            for item in e.iter_mut() {
                let take = rng.random_range(0..=left);
                *item = take;
                left -= take;
            }
            p.add_term(
                MultiIndex(e),
                GaussRat::from_ratio(rng.random_range(-4i64..=4), rng.random_range(1i64..=3)),
            );
        }
        if p.coeffs.is_empty() {
            continue;
        }
        let h = p.homogenize(deg).unwrap().to_float();
        if h.is_zero() {
            continue;
        }
        let sa = norms::sa_norm(&h, 1e-8).unwrap().value;
        // |p| at polydisc points never exceeds the homogenized tuple norm
        for _ in 0..200 {
            let z: Vec<Complex64> = (0..d)
                .map(|_| {
                    Complex64::from_polar(
                        rng.random::<f64>(),
                        rng.random::<f64>() * std::f64::consts::TAU,
                    )
                })
                .collect();
            let val = p.eval(&z).norm();
            assert!(
                val <= sa + 1e-6,
                "sample {val} exceeds homogenized bound {sa}"
            );
        }
    }
}

#[test]
fn sa_problem_agrees_with_its_conic_dual() {
    let tol = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..4 {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=3u32);
        let p = norms::random_poly(d, n, &mut rng);
        let prob = norms::sa_norm_problem(&p).unwrap();
        let primal = sdp::solve(&prob, tol, tol).unwrap();
        let dual = sdp::solve(&prob.conic_dual(), tol, tol).unwrap();
        assert_eq!(primal.status, sdp::SolveStatus::Optimal);
        assert_eq!(dual.status, sdp::SolveStatus::Optimal);
        assert!(
            (primal.primal - dual.primal).abs() <= 2.0 * tol * (1.0 + primal.primal.abs()),
            "primal {} vs dual-of-primal {}",
            primal.primal,
            dual.primal
        );
    }
}

#[test]
fn ratio_of_monomials_is_one() {
    for (text, d) in [("z1^2 z2", 2), ("z1 z2 z3", 3)] {
        let p = parse_poly(text, d).unwrap().to_float();
        let r = norms::ratio(&p, 1e-8).unwrap();
        assert!((r - 1.0).abs() < 1e-6, "{text}: ratio {r}");
    }
    // scaling does not change the ratio
    let p = exact_poly(2, &[("3/2", &[1, 1])]).to_float();
    let r = norms::ratio(&p, 1e-8).unwrap();
    assert!((r - 1.0).abs() < 1e-6);
}
