//! Certified upper bounds on `||φ_n||` from explicit factorizations.
//!
//! Any representation `φ(x) = Σ_k A_k x B_k` of the extension `φ ∘ P_V` gives
//! `||φ||_cb <= ||Σ A_k A_k*||^½ ||Σ B_k* B_k||^½`. Starting from the SVD of
//! the reshuffled coefficient tensor, the free `GL(r)` gauge
//! `A -> A G, B -> G⁻¹ B` is tuned to shrink the bound; only the Gram matrix
//! `H = G G*` matters, so the search runs over positive definite `H`.

use nalgebra::DVector;

use super::{LinearMapRep, UpperBounds};
use crate::bracket::BoundSource;
use crate::linalg::{self, CMat, C64, ZERO};

/// Relative padding applied to every factorization bound.
const PAD: f64 = 1e-12;
const STAGES: [f64; 4] = [4.0, 16.0, 64.0, 256.0];
const STEPS_PER_STAGE: usize = 80;

pub(crate) fn upper_bounds(map: &LinearMapRep) -> UpperBounds {
    if map.is_zero() {
        return UpperBounds {
            level_one: (0.0, BoundSource::TrivialZero),
            cb: 0.0,
            transpose: 0.0,
        };
    }
    let d = map.domain().ambient_dim();
    let m = map.codomain().ambient_dim();
    let units = map.extended_unit_images();
    let cb = haagerup_bound(&units, d, m);
    // ψ = φ ∘ T, so that φ(x) = ψ(xᵀ).
    let swapped: Vec<CMat> = (0..d * d).map(|idx| units[(idx % d) * d + idx / d].clone()).collect();
    let transpose = haagerup_bound(&swapped, d, m);

    let mut level_one = (coefficient_relaxation(map), BoundSource::CoefficientRelaxation);
    for cand in [
        (cb, BoundSource::CbCap),
        (transpose, BoundSource::TransposeFactorization),
    ] {
        if cand.0 < level_one.0 {
            level_one = cand;
        }
    }
    if m == 1 && map.domain().is_full() {
        // Functional on M_d: ||f|| is the trace norm of its coefficient matrix.
        let c = CMat::from_fn(d, d, |i, j| units[i * d + j][(0, 0)]);
        let exact = linalg::trace_norm(&c) * (1.0 + PAD);
        if exact <= level_one.0 {
            level_one = (exact, BoundSource::ExactSvd);
        }
    }
    UpperBounds {
        level_one,
        cb,
        transpose,
    }
}

/// `||φ(x)|| <= ||φ(x)||_F <= sqrt(λmax Gram_W) ||coeff|| ||c||` and
/// `||c|| <= ||x||_F / sqrt(λmin Gram_V) <= sqrt(d) ||x|| / sqrt(λmin Gram_V)`.
fn coefficient_relaxation(map: &LinearMapRep) -> f64 {
    let gram_w = linalg::max_eigenvalue(map.codomain().gram());
    let gram_v = map
        .domain()
        .gram()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, &x| m.min(x));
    let d = map.domain().ambient_dim() as f64;
    let bound = linalg::spectral_norm(map.coeff()) * gram_w.sqrt() * d.sqrt() / gram_v.sqrt();
    bound * (1.0 + PAD)
}

/// Factorization data for `φ(E_ij) = Σ_l A_l E_ij B_l`.
struct Factorization {
    // PA[l * r + l'] = A_l A_l'*, PB[l * r + l'] = B_l* B_l'.
    pa: Vec<CMat>,
    pb: Vec<CMat>,
    rank: usize,
    // cb-norm bound on the part dropped by truncation and by rounding.
    residual: f64,
}

/// Haagerup-type bound on the cb norm of the map with the given matrix-unit
/// images (`units[i * d + j] = φ(E_ij)`, each `m x m`).
pub(crate) fn haagerup_bound(units: &[CMat], d: usize, m: usize) -> f64 {
    let Some(f) = factorize(units, d, m) else {
        return 0.0;
    };
    let eye = CMat::identity(f.rank, f.rank);
    let mut best = f.exact_value(&eye, &eye);
    if f.rank > 1 {
        best = best.min(f.optimize());
    }
    (best.sqrt() + f.residual) * (1.0 + PAD)
}

fn factorize(units: &[CMat], d: usize, m: usize) -> Option<Factorization> {
    // M[(a, i), (b, j)] = φ(E_ij)[a, b]
    let md = m * d;
    let big = CMat::from_fn(md, md, |row, col| {
        let (a, i) = (row / d, row % d);
        let (b, j) = (col / d, col % d);
        units[i * d + j][(a, b)]
    });
    let svd = linalg::thin_svd(&big, 1e-14);
    if svd.sigma.is_empty() {
        return None;
    }
    let a_terms: Vec<CMat> = svd
        .sigma
        .iter()
        .enumerate()
        .map(|(l, s)| {
            let w = s.sqrt();
            CMat::from_fn(m, d, |a, i| svd.u[(a * d + i, l)] * w)
        })
        .collect();
    let b_terms: Vec<CMat> = svd
        .sigma
        .iter()
        .enumerate()
        .map(|(l, s)| {
            let w = s.sqrt();
            CMat::from_fn(d, m, |j, b| svd.v[(b * d + j, l)].conj() * w)
        })
        .collect();

    // The residual map x ↦ Σ_ij x_ij R_ij has cb norm at most Σ ||R_ij||.
    let mut residual = svd.dropped;
    for i in 0..d {
        for j in 0..d {
            let mut rebuilt = CMat::zeros(m, m);
            for (a, b) in a_terms.iter().zip(&b_terms) {
                rebuilt += a.column(i) * b.row(j);
            }
            residual += (rebuilt - &units[i * d + j]).norm();
        }
    }

    let r = svd.sigma.len();
    let mut pa = Vec::with_capacity(r * r);
    let mut pb = Vec::with_capacity(r * r);
    for l in 0..r {
        for lp in 0..r {
            pa.push(&a_terms[l] * a_terms[lp].adjoint());
            pb.push(b_terms[l].adjoint() * &b_terms[lp]);
        }
    }
    Some(Factorization {
        pa,
        pb,
        rank: r,
        residual,
    })
}

impl Factorization {
    fn row_sum(&self, h: &CMat) -> CMat {
        combine(&self.pa, h, self.rank)
    }

    fn col_sum(&self, k: &CMat) -> CMat {
        combine(&self.pb, k, self.rank)
    }

    /// `λmax(Σ H_ll' A_l A_l'*) · λmax(Σ K_ll' B_l* B_l')`, with `K = H⁻¹`.
    fn exact_value(&self, h: &CMat, k: &CMat) -> f64 {
        linalg::max_eigenvalue(&self.row_sum(h)).max(0.0) * linalg::max_eigenvalue(&self.col_sum(k)).max(0.0)
    }

    /// Smoothed objective `log ||A(H)||_β + log ||B(H⁻¹)||_β` and its Euclidean
    /// gradient with respect to `H`.
    fn smoothed(&self, h: &CMat, k: &CMat, beta: f64) -> (f64, CMat) {
        let (va, ga) = schatten_log(&self.row_sum(h), beta);
        let (vb, gb) = schatten_log(&self.col_sum(k), beta);
        let r = self.rank;
        let mut da = CMat::zeros(r, r);
        let mut eb = CMat::zeros(r, r);
        for l in 0..r {
            for lp in 0..r {
                da[(lp, l)] = (&ga * &self.pa[l * r + lp]).trace();
                eb[(lp, l)] = (&gb * &self.pb[l * r + lp]).trace();
            }
        }
        let grad = da - k * eb * k;
        (va + vb, linalg::hermitian_part(&grad))
    }

    /// Riemannian descent over positive definite `H = L L*` with a schedule of
    /// increasingly sharp smooth maxima; returns the best exact value seen.
    fn optimize(&self) -> f64 {
        let r = self.rank;
        let mut l = CMat::identity(r, r);
        let eye = CMat::identity(r, r);
        let mut best = self.exact_value(&eye, &eye);
        for &beta in &STAGES {
            let mut step = 0.5;
            let Some(mut state) = self.evaluate(&l, beta) else {
                break;
            };
            for _ in 0..STEPS_PER_STAGE {
                let s = linalg::hermitian_part(&(l.adjoint() * &state.grad * &l));
                let snorm = linalg::spectral_norm(&s);
                if snorm < 1e-13 {
                    break;
                }
                let mut accepted = false;
                while step > 1e-10 {
                    let cand = &l * hermitian_exp(&s, -0.5 * step / snorm);
                    if let Some(next) = self.evaluate(&cand, beta) {
                        if next.value < state.value {
                            l = cand;
                            state = next;
                            accepted = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
                if let Some(v) = state.certified {
                    best = best.min(v);
                }
                step = (step * 1.5).min(2.0);
            }
        }
        best
    }

    fn evaluate(&self, l: &CMat, beta: f64) -> Option<State> {
        let h = l * l.adjoint();
        let l_inv = l.clone().lu().try_inverse()?;
        let k = l_inv.adjoint() * &l_inv;
        let (value, grad) = self.smoothed(&h, &k, beta);
        if !value.is_finite() {
            return None;
        }
        // Only trust the exact value when K is an accurate inverse of H.
        let defect = linalg::max_abs_diff(&(&h * &k), &CMat::identity(self.rank, self.rank));
        let certified = (defect <= 1e-12).then(|| self.exact_value(&h, &k));
        Some(State { value, grad, certified })
    }
}

struct State {
    value: f64,
    grad: CMat,
    certified: Option<f64>,
}

fn combine(parts: &[CMat], weights: &CMat, r: usize) -> CMat {
    let m = parts[0].nrows();
    let mut out = CMat::zeros(m, m);
    for l in 0..r {
        for lp in 0..r {
            let w = weights[(l, lp)];
            if w != ZERO {
                out += &parts[l * r + lp] * w;
            }
        }
    }
    out
}

/// `log ||Z||_β` for positive semidefinite `Z` and its gradient
/// `Z^{β-1} / tr Z^β`.
fn schatten_log(z: &CMat, beta: f64) -> (f64, CMat) {
    let (vals, vecs) = linalg::hermitian_eigen(z);
    let top = vals.iter().fold(0.0_f64, |m, &x| m.max(x));
    if top <= 0.0 {
        return (f64::NEG_INFINITY, CMat::zeros(z.nrows(), z.ncols()));
    }
    let mu: Vec<f64> = vals.iter().map(|&x| x.max(0.0) / top).collect();
    let norm_pow: f64 = mu.iter().map(|&x| x.powf(beta)).sum();
    let value = top.ln() + norm_pow.ln() / beta;
    let weights = DVector::from_iterator(
        mu.len(),
        mu.iter().map(|&x| C64::new(x.powf(beta - 1.0) / (top * norm_pow), 0.0)),
    );
    let grad = &vecs * CMat::from_diagonal(&weights) * vecs.adjoint();
    (value, grad)
}

/// `exp(t S)` for Hermitian `S`.
fn hermitian_exp(s: &CMat, t: f64) -> CMat {
    let (vals, vecs) = linalg::hermitian_eigen(s);
    let diag = DVector::from_iterator(vals.len(), vals.iter().map(|&x| C64::new((t * x).exp(), 0.0)));
    &vecs * CMat::from_diagonal(&diag) * vecs.adjoint()
}
