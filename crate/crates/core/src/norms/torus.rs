//! Supremum-norm estimation on the torus.
//!
//! Homogeneity lets one phase be fixed, so the scan runs over the reduced
//! torus of dimension d-1: a uniform grid (or seeded random multistart when
//! the grid would be astronomically large) followed by gradient ascent on
//! |p|^2. Every reported value is an evaluation at a concrete point and is
//! therefore a certified lower bound of the supremum.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::FloatPoly;

pub struct SupEstimate {
    pub value: f64,
    /// Grid spacing of the scan stage (radians), 0 for the 1-variable case.
    pub resolution: f64,
}

fn point(theta: &[f64]) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = theta
        .iter()
        .map(|&t| Complex64::from_polar(1.0, t))
        .collect();
    z.push(Complex64::ONE);
    z
}

fn abs_at(p: &FloatPoly, theta: &[f64]) -> f64 {
    p.eval(&point(theta)).norm()
}

/// Gradient of |p|^2 over the reduced phases.
fn grad_sq(p: &FloatPoly, partials: &[FloatPoly], theta: &[f64]) -> (f64, Vec<f64>) {
    let z = point(theta);
    let val = p.eval(&z);
    let grad = partials
        .iter()
        .enumerate()
        .map(|(j, dp)| {
            let dz = Complex64::new(0.0, 1.0) * z[j] * dp.eval(&z);
            2.0 * (val.conj() * dz).re
        })
        .collect();
    (val.norm_sqr(), grad)
}

/// Adaptive-step gradient ascent from a starting point; returns the best |p|.
fn ascend(p: &FloatPoly, partials: &[FloatPoly], start: &[f64], max_steps: usize, tol: f64) -> f64 {
    let mut theta = start.to_vec();
    let (mut best_sq, _) = grad_sq(p, partials, &theta);
    let mut step = 0.05;
    for _ in 0..max_steps {
        let (_, g) = grad_sq(p, partials, &theta);
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm * step < tol && step < tol {
            break;
        }
        let scale = if gnorm > 0.0 { step / gnorm } else { 0.0 };
        let trial: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t + scale * gi).collect();
        let (trial_sq, _) = grad_sq(p, partials, &trial);
        if trial_sq > best_sq {
            best_sq = trial_sq;
            theta = trial;
            step *= 1.4;
        } else {
            step *= 0.4;
            if step < 1e-14 {
                break;
            }
        }
    }
    best_sq.sqrt()
}

/// Grid scan plus refinement; the workhorse behind the supremum norm.
pub fn sup_norm_estimate(p: &FloatPoly, grid_per_dim: usize, refine_tol: f64) -> SupEstimate {
    let d = p.d();
    if d == 1 || p.is_zero() {
        // a homogeneous polynomial in one variable has constant modulus on the circle
        return SupEstimate {
            value: abs_at(p, &[]),
            resolution: 0.0,
        };
    }
    let m = d - 1;
    let g = grid_per_dim.max(2);
    let partials: Vec<FloatPoly> = (1..d).map(|j| p.partial(j)).collect();

    let grid_points = (g as f64).powi(m as i32);
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = 8;
    let mut push = |val: f64, theta: Vec<f64>| {
        candidates.push((val, theta));
        candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        candidates.truncate(keep);
    };

    if grid_points <= 2f64.powi(21) {
        let step = std::f64::consts::TAU / g as f64;
        let mut idx = vec![0usize; m];
        loop {
            let theta: Vec<f64> = idx.iter().map(|&i| i as f64 * step).collect();
            push(abs_at(p, &theta), theta);
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == m {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < g {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == m {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_50F7);
        for _ in 0..8192 {
            let theta: Vec<f64> = (0..m)
                .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
                .collect();
            push(abs_at(p, &theta), theta);
        }
    }

    let mut best = 0.0f64;
    for (_, theta) in &candidates {
        best = best.max(ascend(p, &partials, theta, 200, refine_tol));
    }
    SupEstimate {
        value: best,
        resolution: std::f64::consts::TAU / g as f64,
    }
}

/// Cheap seeded estimate used inside combinatorial sign searches.
pub fn sup_estimate_sampled(p: &FloatPoly, samples: usize, refine: usize, seed: u64) -> f64 {
    let d = p.d();
    if d == 1 {
        return abs_at(p, &[]);
    }
    let m = d - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_theta = vec![0.0; m];
    let mut best = abs_at(p, &best_theta);
    for _ in 0..samples {
        let theta: Vec<f64> = (0..m)
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        let v = abs_at(p, &theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    if refine > 0 {
        let partials: Vec<FloatPoly> = (1..d).map(|j| p.partial(j)).collect();
        best = best.max(ascend(p, &partials, &best_theta, refine, 1e-9));
    }
    best
}
