#![allow(dead_code)]

use std::sync::Arc;

use npspace::linalg::{self, C64};
use npspace::{make_map, make_space, LinearMapRep, OperatorSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn full(d: usize) -> Arc<OperatorSpace> {
    OperatorSpace::full_matrix_algebra(d).into_shared()
}

/// A `k`-dimensional subspace of `M_d` spanned by Gaussian matrices.
pub fn random_subspace(d: usize, k: usize, seed: u64) -> OperatorSpace {
    let mut r = rng(seed);
    let basis = (0..k).map(|_| linalg::random_matrix(d, d, &mut r)).collect();
    make_space(d, basis, format!("rand{d}x{k}#{seed}")).expect("Gaussian bases are independent")
}

/// A map `M_d -> M_d` with Gaussian coefficients.
pub fn random_map(d: usize, seed: u64) -> LinearMapRep {
    let v = full(d);
    let mut r = rng(seed);
    let k = d * d;
    let action = (0..k)
        .map(|_| (0..k).map(|_| linalg::random_complex(&mut r)).collect())
        .collect();
    make_map(v.clone(), v, action, format!("random_M{d}#{seed}")).unwrap()
}

/// `Σ_{n>=1} n^{-p}` from 10^6 terms summed smallest first, closed with the
/// plain comparison `∫_{N+1}^∞ <= tail <= ∫_N^∞`. Shares no code with the
/// library's tail bounds.
pub fn zeta_oracle(p: f64) -> (f64, f64) {
    let n_max = 1_000_000_u64;
    let partial: f64 = (1..=n_max).rev().map(|n| (n as f64).powf(-p)).sum();
    let q = p - 1.0;
    let n = n_max as f64;
    let slack = 1e-13 * partial;
    (
        partial - slack + (n + 1.0).powf(-q) / q,
        partial + slack + n.powf(-q) / q,
    )
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
