//! Concrete operator spaces `V ⊆ M_d` and their matrix levels `M_n(V) ⊆ M_{nd}`.

mod axioms;

pub use axioms::{verify_axioms, verify_axioms_with, AxiomCheck, AxiomReport};

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ZERO};

/// Relative cutoff on the Gram matrix spectrum below which a basis is
/// treated as dependent.
pub const BASIS_TOLERANCE: f64 = 1e-10;

/// A subspace of `d x d` complex matrices given by an ordered basis.
#[derive(Debug, Clone)]
pub struct OperatorSpace {
    label: String,
    ambient_dim: usize,
    basis: Vec<CMat>,
    // Vectorized basis B = Q R with orthonormal columns Q.
    onb: CMat,
    r_inv: CMat,
    gram: CMat,
    // Basis is E_11, E_12, ..., E_dd: coordinates are the entries themselves.
    units: bool,
}

/// Build and validate an operator space.
pub fn make_space(ambient_dim: usize, basis: Vec<CMat>, label: impl Into<String>) -> Result<OperatorSpace> {
    OperatorSpace::new(ambient_dim, basis, label)
}

impl OperatorSpace {
    pub fn new(ambient_dim: usize, basis: Vec<CMat>, label: impl Into<String>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        if basis.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let d = ambient_dim;
        if basis.len() > d * d {
            return Err(Error::DependentBasis { ratio: 0.0 });
        }
        for m in &basis {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d}x{d}"),
                    found: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidParameter("basis matrix has non-finite entries".into()));
            }
        }
        let k = basis.len();
        let stacked = CMat::from_fn(d * d, k, |r, c| basis[c].as_slice()[r]);
        let gram = stacked.adjoint() * &stacked;
        let sv = gram.clone().svd(false, false).singular_values;
        let (smin, smax) = sv
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        if !(ratio > BASIS_TOLERANCE) {
            return Err(Error::DependentBasis { ratio });
        }
        let qr = stacked.qr();
        let onb = qr.q();
        let r = qr.r();
        let r_inv = r.lu().try_inverse().ok_or(Error::DependentBasis { ratio })?;
        let units = k == d * d
            && basis
                .iter()
                .enumerate()
                .all(|(idx, b)| *b == linalg::matrix_unit(d, idx / d, idx % d));
        Ok(Self {
            label: label.into(),
            ambient_dim: d,
            basis,
            onb,
            r_inv,
            gram,
            units,
        })
    }

    /// The full matrix algebra `M_d` with the matrix-unit basis `E_11, E_12, ..., E_dd`
    /// (row-major order).
    pub fn full_matrix_algebra(d: usize) -> Self {
        let basis = (0..d * d).map(|idx| linalg::matrix_unit(d, idx / d, idx % d)).collect();
        Self::new(d, basis, format!("M{d}")).expect("matrix units are independent")
    }

    pub fn scalars() -> Self {
        Self::full_matrix_algebra(1)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of basis elements `k`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// `V = M_d`.
    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim * self.ambient_dim
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    /// `sum_t coords[t] * basis[t]`.
    pub fn combine(&self, coords: &[C64]) -> CMat {
        debug_assert_eq!(coords.len(), self.dim());
        let d = self.ambient_dim;
        if self.units {
            return CMat::from_fn(d, d, |i, j| coords[i * d + j]);
        }
        let mut out = CMat::zeros(d, d);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != ZERO {
                out.zip_apply(b, |o, x| *o += x * *c);
            }
        }
        out
    }

    /// Orthogonal (Hilbert-Schmidt) projection of `m` onto the space, in basis
    /// coordinates.
    pub fn project_coords(&self, m: &CMat) -> CVec {
        if self.units {
            let d = self.ambient_dim;
            return CVec::from_fn(d * d, |idx, _| m[(idx / d, idx % d)]);
        }
        let z = self.onb.adjoint() * linalg::vectorize(m);
        &self.r_inv * z
    }

    /// Hilbert-Schmidt projection of `m` onto the space.
    pub fn project(&self, m: &CMat) -> CMat {
        if self.is_full() {
            return m.clone();
        }
        let z = self.onb.adjoint() * linalg::vectorize(m);
        let v = &self.onb * z;
        linalg::unvectorize(v.as_slice(), self.ambient_dim, self.ambient_dim)
    }

    /// Coordinates of `m` if it lies in the space (within `rel_tol`).
    pub fn coords_of(&self, m: &CMat, rel_tol: f64) -> Result<CVec> {
        if m.nrows() != self.ambient_dim || m.ncols() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.ambient_dim),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let coords = self.project_coords(m);
        let back = self.combine(coords.as_slice());
        let residual = linalg::max_abs_diff(&back, m);
        let scale = linalg::max_abs(m).max(1.0);
        if residual > rel_tol * scale {
            return Err(Error::InconsistentAction {
                residual: residual / scale,
            });
        }
        Ok(coords)
    }

    /// Map a realized-space linear functional `Re <g, x>` back from coordinates:
    /// given `h` with `Re sum_s c_s h_s`, return the representer `g` inside the
    /// space.
    pub(crate) fn representer(&self, h: &[C64]) -> CMat {
        if self.units {
            let d = self.ambient_dim;
            return CMat::from_fn(d, d, |i, j| h[i * d + j].conj());
        }
        let hc = CVec::from_iterator(h.len(), h.iter().map(|z| z.conj()));
        let y = self.r_inv.adjoint() * hc;
        let v = &self.onb * y;
        linalg::unvectorize(v.as_slice(), self.ambient_dim, self.ambient_dim)
    }

    /// Whether two spaces have the same ambient dimension and basis.
    pub fn same_as(&self, other: &OperatorSpace) -> bool {
        std::ptr::eq(self, other) || (self.ambient_dim == other.ambient_dim && self.basis == other.basis)
    }
}

fn check_same(a: &OperatorSpace, b: &OperatorSpace) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// An element `(v_ij)` of `M_n(V)`, stored as an `n x n` array of coordinate
/// vectors over the basis of `V`.
#[derive(Debug, Clone)]
pub struct SpaceElement {
    space: Arc<OperatorSpace>,
    level: usize,
    // Entry (i, j), coordinate t at (i * n + j) * k + t.
    coords: Vec<C64>,
}

impl SpaceElement {
    pub fn new(space: Arc<OperatorSpace>, level: usize, coords: Vec<C64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidLevel(0));
        }
        let expected = level * level * space.dim();
        if coords.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: format!("{expected} coordinates"),
                found: format!("{}", coords.len()),
            });
        }
        Ok(Self { space, level, coords })
    }

    pub fn zeros(space: Arc<OperatorSpace>, level: usize) -> Result<Self> {
        let len = level * level * space.dim();
        Self::new(space, level, vec![ZERO; len])
    }

    /// Build from a closure returning the coordinates of entry `(i, j)`.
    pub fn from_entries<F>(space: Arc<OperatorSpace>, level: usize, mut entry: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<C64>,
    {
        let k = space.dim();
        let mut coords = Vec::with_capacity(level * level * k);
        for i in 0..level {
            for j in 0..level {
                let c = entry(i, j);
                if c.len() != k {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{k}"),
                        found: format!("{}", c.len()),
                    });
                }
                coords.extend(c);
            }
        }
        Self::new(space, level, coords)
    }

    /// Level-1 element with the given coordinates.
    pub fn single(space: Arc<OperatorSpace>, coords: Vec<C64>) -> Result<Self> {
        Self::new(space, 1, coords)
    }

    /// Gaussian random coordinates (unnormalized).
    pub fn random<R: Rng + ?Sized>(space: Arc<OperatorSpace>, level: usize, rng: &mut R) -> Self {
        let len = level * level * space.dim();
        let coords = (0..len).map(|_| linalg::random_complex(rng)).collect();
        Self { space, level, coords }
    }

    /// Split a realized `(nd) x (nd)` matrix into blocks and project each onto `V`.
    pub fn from_realized(space: Arc<OperatorSpace>, level: usize, m: &CMat) -> Result<Self> {
        let d = space.ambient_dim();
        if m.nrows() != level * d || m.ncols() != level * d {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", level * d),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let k = space.dim();
        if space.units {
            let coords = (0..level * level * k)
                .map(|idx| {
                    let (ij, ab) = (idx / k, idx % k);
                    m[((ij / level) * d + ab / d, (ij % level) * d + ab % d)]
                })
                .collect();
            return Self::new(space, level, coords);
        }
        let mut coords = Vec::with_capacity(level * level * k);
        for i in 0..level {
            for j in 0..level {
                let block = m.view((i * d, j * d), (d, d)).into_owned();
                coords.extend(space.project_coords(&block).iter().copied());
            }
        }
        Self::new(space, level, coords)
    }

    pub fn space(&self) -> &Arc<OperatorSpace> {
        &self.space
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn entry(&self, i: usize, j: usize) -> &[C64] {
        let k = self.space.dim();
        let start = (i * self.level + j) * k;
        &self.coords[start..start + k]
    }

    /// The `(nd) x (nd)` block matrix with `(i, j)` block `v_ij`.
    pub fn realize(&self) -> CMat {
        let n = self.level;
        let d = self.space.ambient_dim();
        if self.space.units {
            let k = d * d;
            return CMat::from_fn(n * d, n * d, |r, c| {
                let (i, a, j, b) = (r / d, r % d, c / d, c % d);
                self.coords[(i * n + j) * k + a * d + b]
            });
        }
        let mut out = CMat::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                let block = self.space.combine(self.entry(i, j));
                out.view_mut((i * d, j * d), (d, d)).copy_from(&block);
            }
        }
        out
    }

    /// `||x||_{M_n(V)}`: spectral norm of the realization.
    pub fn level_norm(&self) -> f64 {
        linalg::spectral_norm(&self.realize())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            coords: self.coords.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: C64, other: &SpaceElement, b: C64) -> Result<Self> {
        check_same(&self.space, &other.space)?;
        if self.level != other.level {
            return Err(Error::DimensionMismatch {
                expected: format!("level {}", self.level),
                found: format!("level {}", other.level),
            });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self { coords, ..self.clone() })
    }

    /// Block-diagonal direct sum `v ⊕ w` at level `m + n`.
    pub fn direct_sum(&self, other: &SpaceElement) -> Result<Self> {
        check_same(&self.space, &other.space)?;
        let (m, n) = (self.level, other.level);
        let k = self.space.dim();
        Self::from_entries(self.space.clone(), m + n, |i, j| {
            if i < m && j < m {
                self.entry(i, j).to_vec()
            } else if i >= m && j >= m {
                other.entry(i - m, j - m).to_vec()
            } else {
                vec![ZERO; k]
            }
        })
    }

    /// Scalar sandwich `alpha x beta` with `alpha` of size `p x n` and `beta` of
    /// size `n x p`; the result lives in `M_p(V)`.
    pub fn sandwich(&self, alpha: &CMat, beta: &CMat) -> Result<Self> {
        let n = self.level;
        if alpha.ncols() != n || beta.nrows() != n || alpha.nrows() != beta.ncols() {
            return Err(Error::DimensionMismatch {
                expected: format!("p x {n} and {n} x p"),
                found: format!(
                    "{}x{} and {}x{}",
                    alpha.nrows(),
                    alpha.ncols(),
                    beta.nrows(),
                    beta.ncols()
                ),
            });
        }
        let p = alpha.nrows();
        let k = self.space.dim();
        Self::from_entries(self.space.clone(), p, |i, j| {
            let mut acc = vec![ZERO; k];
            for a in 0..n {
                for b in 0..n {
                    let w = alpha[(i, a)] * beta[(b, j)];
                    if w == ZERO {
                        continue;
                    }
                    for (slot, c) in acc.iter_mut().zip(self.entry(a, b)) {
                        *slot += w * c;
                    }
                }
            }
            acc
        })
    }

    /// Embed into `M_{n+1}(V)` with a zero last row and column.
    pub fn pad_zero(&self) -> Self {
        let n = self.level;
        let k = self.space.dim();
        Self::from_entries(self.space.clone(), n + 1, |i, j| {
            if i < n && j < n {
                self.entry(i, j).to_vec()
            } else {
                vec![ZERO; k]
            }
        })
        .expect("shape is consistent")
    }
}
