//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest singular value.
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |m, &s| m.max(s))
}

/// Sum of singular values.
pub fn trace_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().sum()
}

/// Singular triples of `a` with `sigma > rel_cut * sigma_max`, sorted by
/// decreasing `sigma`, plus the sum of the discarded singular values.
///
/// Read off the Hermitian dilation `[[0, a], [a*, 0]]`, whose positive
/// eigenpairs are `(sigma, (u, v) / sqrt 2)`. `nalgebra`'s complex SVD returns
/// wrong singular values for some rank-deficient inputs when vectors are
/// requested, while its Hermitian eigensolver does not.
pub struct ThinSvd {
    pub sigma: Vec<f64>,
    pub u: CMat,
    pub v: CMat,
    pub dropped: f64,
}

pub fn thin_svd(a: &CMat, rel_cut: f64) -> ThinSvd {
    let (r, c) = a.shape();
    let mut dil = CMat::zeros(r + c, r + c);
    dil.view_mut((0, r), (r, c)).copy_from(a);
    dil.view_mut((r, 0), (c, r)).copy_from(&a.adjoint());
    let eig = dil.symmetric_eigen();
    let mut order: Vec<usize> = (0..r + c).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let smax = order.first().map_or(0.0, |&i| eig.eigenvalues[i]);
    let (mut sigma, mut us, mut vs, mut dropped) = (Vec::new(), Vec::new(), Vec::new(), 0.0);
    for &i in order.iter().take(r.min(c)) {
        let s = eig.eigenvalues[i];
        if s <= smax * rel_cut {
            dropped += s;
            continue;
        }
        let w = eig.eigenvectors.column(i);
        let (u, v) = (w.rows(0, r).into_owned(), w.rows(r, c).into_owned());
        let (nu, nv) = (u.norm(), v.norm());
        if nu == 0.0 || nv == 0.0 {
            dropped += s;
            continue;
        }
        sigma.push(s);
        us.push(u.unscale(nu));
        vs.push(v.unscale(nv));
    }
    let u = if us.is_empty() {
        CMat::zeros(r, 0)
    } else {
        CMat::from_columns(&us)
    };
    let v = if vs.is_empty() {
        CMat::zeros(c, 0)
    } else {
        CMat::from_columns(&vs)
    };
    ThinSvd { sigma, u, v, dropped }
}

/// Top singular triple `(sigma, u, v)` with `a v = sigma u`.
pub fn top_singular_pair(a: &CMat) -> (f64, CVec, CVec) {
    let svd = thin_svd(a, 0.0);
    if svd.sigma.is_empty() {
        let mut u = CVec::zeros(a.nrows());
        let mut v = CVec::zeros(a.ncols());
        u[0] = ONE;
        v[0] = ONE;
        return (0.0, u, v);
    }
    // Recompute sigma from the vectors so that a v = sigma u to rounding.
    let v = svd.v.column(0).into_owned();
    let av = a * &v;
    let sigma = av.norm();
    let u = if sigma > 0.0 {
        av.unscale(sigma)
    } else {
        svd.u.column(0).into_owned()
    };
    (sigma, u, v)
}

/// Partial isometry `U V*` over the nonzero singular values of `a`: a
/// maximizer of `Re tr(x* a)` over the spectral unit ball.
pub fn polar_factor(a: &CMat) -> CMat {
    let svd = thin_svd(a, 1e-13);
    &svd.u * svd.v.adjoint()
}

/// Unitary polar factor of an invertible square matrix by the scaled Newton
/// iteration `X <- (γ X + X^{-*} / γ) / 2`. Falls back to [`polar_factor`]
/// when `a` is ill-conditioned, the iteration stalls or the result is not
/// unitary to rounding.
pub fn unitary_polar(a: &CMat) -> CMat {
    const MAX_ITER: usize = 40;
    // Frobenius condition number above which the inverse is not trusted.
    const MAX_CONDITION: f64 = 1e8;
    let mut x = a.clone();
    for iter in 0..MAX_ITER {
        // LU rather than `try_inverse`, whose closed forms for sizes up to 4
        // only reject an exactly zero determinant.
        let Some(inv) = x.clone().lu().try_inverse() else {
            return polar_factor(a);
        };
        let inv_h = inv.adjoint();
        let (norm, inv_norm) = (x.norm(), inv.norm());
        if iter == 0 && !(norm * inv_norm <= MAX_CONDITION) {
            return polar_factor(a);
        }
        let gamma = (inv_norm / norm).sqrt();
        if !gamma.is_finite() || gamma == 0.0 {
            return polar_factor(a);
        }
        let next = (x.scale(gamma) + inv_h.scale(1.0 / gamma)).scale(0.5);
        let moved = (&next - &x).norm();
        x = next;
        if moved <= 1e-14 * x.norm() {
            let n = x.nrows();
            let defect = (x.adjoint() * &x - CMat::identity(n, n)).norm();
            return if defect <= 1e-12 * n as f64 { x } else { polar_factor(a) };
        }
    }
    polar_factor(a)
}

/// Clip singular values at 1, i.e. the Frobenius-nearest point of the
/// spectral unit ball.
pub fn clip_to_unit_ball(a: &CMat) -> CMat {
    if spectral_norm(a) <= 1.0 {
        return a.clone();
    }
    let svd = thin_svd(a, 0.0);
    let mut out = a.clone();
    for (l, &s) in svd.sigma.iter().enumerate() {
        if s > 1.0 {
            out -= svd.u.column(l) * svd.v.column(l).adjoint() * C64::new(s - 1.0, 0.0);
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues unsorted.
pub fn hermitian_eigen(a: &CMat) -> (DVector<f64>, CMat) {
    let h = hermitian_part(a);
    let eig = h.symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

pub fn max_eigenvalue(a: &CMat) -> f64 {
    let h = hermitian_part(a);
    h.symmetric_eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &x| m.max(x))
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Column-major vectorization.
pub fn vectorize(a: &CMat) -> CVec {
    CVec::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v)
}

pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMat {
    let mut e = CMat::zeros(d, d);
    e[(i, j)] = ONE;
    e
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.norm()))
}

/// Nudge a lower bound down and an upper bound up by a few ulps to absorb
/// rounding in the final summation.
pub fn round_down(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    x - x.abs() * 4.0 * f64::EPSILON
}

pub fn round_up(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    x + x.abs() * 4.0 * f64::EPSILON
}
