//! Linear maps `φ: V → W` between concrete operator spaces, their
//! amplifications `φ_n`, and certified brackets for `||φ_n||`.

mod ascent;
mod factor;
mod table;

pub use ascent::{OptBudget, Witness};
pub use table::{
    base_norm, base_norm_with, build_level_table, cb_norm, level_norm_bracket, CbNorm, LevelEntry, LevelNormTable,
};

use std::sync::{Arc, OnceLock};

use crate::bracket::BoundSource;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, ZERO};
use crate::opspace::{OperatorSpace, SpaceElement};

/// Relative tolerance for the matrix-level consistency check of a map.
pub const ACTION_TOLERANCE: f64 = 1e-12;

/// `φ: V → W` stored as a `k_W x k_V` coefficient matrix acting on basis
/// coordinates.
#[derive(Debug, Clone)]
pub struct LinearMapRep {
    label: String,
    domain: Arc<OperatorSpace>,
    codomain: Arc<OperatorSpace>,
    coeff: CMat,
    // φ(b_s) realized in the codomain's ambient M_m.
    images: Vec<CMat>,
    bounds: OnceLock<UpperBounds>,
}

/// Level-independent certified upper-bound data, computed once per map.
#[derive(Debug, Clone, Copy)]
pub(crate) struct UpperBounds {
    /// Best certified bound on `||φ||` and where it came from.
    pub level_one: (f64, BoundSource),
    /// Factorization bound on `||φ||_cb`.
    pub cb: f64,
    /// Factorization bound for `φ ∘ transpose`; `||φ_n|| <= transpose * min(n, d)`.
    pub transpose: f64,
}

/// Build a map from the images of the domain basis, given in codomain
/// coordinates.
pub fn make_map(
    domain: Arc<OperatorSpace>,
    codomain: Arc<OperatorSpace>,
    action: Vec<Vec<C64>>,
    label: impl Into<String>,
) -> Result<LinearMapRep> {
    LinearMapRep::new(domain, codomain, action, label)
}

impl LinearMapRep {
    pub fn new(
        domain: Arc<OperatorSpace>,
        codomain: Arc<OperatorSpace>,
        action: Vec<Vec<C64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let (kv, kw) = (domain.dim(), codomain.dim());
        if action.len() != kv {
            return Err(Error::DimensionMismatch {
                expected: format!("{kv} basis images"),
                found: format!("{}", action.len()),
            });
        }
        let mut coeff = CMat::zeros(kw, kv);
        for (s, col) in action.iter().enumerate() {
            if col.len() != kw {
                return Err(Error::DimensionMismatch {
                    expected: format!("{kw} codomain coordinates"),
                    found: format!("{}", col.len()),
                });
            }
            if col.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidParameter("map action has non-finite coordinates".into()));
            }
            for (t, z) in col.iter().enumerate() {
                coeff[(t, s)] = *z;
            }
        }
        Ok(Self::from_coeff(domain, codomain, coeff, label.into()))
    }

    /// Build from a matrix-level definition `f`, which must send every domain
    /// basis element into the codomain.
    pub fn from_matrix_fn<F>(
        domain: Arc<OperatorSpace>,
        codomain: Arc<OperatorSpace>,
        f: F,
        label: impl Into<String>,
    ) -> Result<Self>
    where
        F: Fn(&CMat) -> CMat,
    {
        let action = domain
            .basis()
            .iter()
            .map(|b| {
                codomain
                    .coords_of(&f(b), ACTION_TOLERANCE)
                    .map(|c| c.iter().copied().collect())
            })
            .collect::<Result<Vec<Vec<C64>>>>()?;
        let map = Self::new(domain, codomain, action, label)?;
        map.check_action(f)?;
        Ok(map)
    }

    fn from_coeff(domain: Arc<OperatorSpace>, codomain: Arc<OperatorSpace>, coeff: CMat, label: String) -> Self {
        let images = (0..domain.dim())
            .map(|s| {
                let col: Vec<C64> = coeff.column(s).iter().copied().collect();
                codomain.combine(&col)
            })
            .collect();
        Self {
            label,
            domain,
            codomain,
            coeff,
            images,
            bounds: OnceLock::new(),
        }
    }

    /// Verify that the coordinate action agrees with `f` on every basis element.
    pub fn check_action<F>(&self, f: F) -> Result<()>
    where
        F: Fn(&CMat) -> CMat,
    {
        let mut worst = 0.0_f64;
        for (b, img) in self.domain.basis().iter().zip(&self.images) {
            let want = f(b);
            if want.shape() != img.shape() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{:?}", img.shape()),
                    found: format!("{:?}", want.shape()),
                });
            }
            let scale = linalg::max_abs(&want).max(1.0);
            worst = worst.max(linalg::max_abs_diff(&want, img) / scale);
        }
        if worst > ACTION_TOLERANCE {
            return Err(Error::InconsistentAction { residual: worst });
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn domain(&self) -> &Arc<OperatorSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<OperatorSpace> {
        &self.codomain
    }

    pub fn coeff(&self) -> &CMat {
        &self.coeff
    }

    /// `φ(b_s)` as matrices in the codomain ambient algebra.
    pub fn basis_images(&self) -> &[CMat] {
        &self.images
    }

    /// Action columns in codomain coordinates, as accepted by [`make_map`].
    pub fn action(&self) -> Vec<Vec<C64>> {
        (0..self.coeff.ncols())
            .map(|s| self.coeff.column(s).iter().copied().collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|z| *z == ZERO)
    }

    /// Whether the codomain is all of `M_m`.
    pub fn full_codomain(&self) -> bool {
        self.codomain.is_full()
    }

    /// Level at which Smith's lemma pins the norms: the codomain's ambient size.
    pub fn smith_level(&self) -> usize {
        self.codomain.ambient_dim()
    }

    /// `c · φ`.
    pub fn scaled(&self, c: C64) -> Self {
        Self::from_coeff(
            self.domain.clone(),
            self.codomain.clone(),
            self.coeff.map(|z| z * c),
            self.label.clone(),
        )
    }

    /// `φ + ψ` for maps with the same domain and codomain.
    pub fn add(&self, other: &LinearMapRep) -> Result<Self> {
        if !self.domain.same_as(&other.domain) || !self.codomain.same_as(&other.codomain) {
            return Err(Error::SpaceMismatch);
        }
        let label = format!("{}+{}", self.label, other.label);
        Ok(Self::from_coeff(
            self.domain.clone(),
            self.codomain.clone(),
            &self.coeff + &other.coeff,
            label,
        ))
    }

    /// `φ` applied to a matrix of the domain (projected onto `V` first).
    pub fn apply_matrix(&self, x: &CMat) -> CMat {
        let c = self.domain.project_coords(x);
        self.image_of(c.as_slice())
    }

    fn image_of(&self, coords: &[C64]) -> CMat {
        let m = self.codomain.ambient_dim();
        let mut out = CMat::zeros(m, m);
        for (c, img) in coords.iter().zip(&self.images) {
            if *c != ZERO {
                out.zip_apply(img, |o, x| *o += x * *c);
            }
        }
        out
    }

    /// `φ_n(x)`: apply `φ` entrywise.
    pub fn amplify(&self, x: &SpaceElement) -> Result<SpaceElement> {
        if !x.space().same_as(&self.domain) {
            return Err(Error::SpaceMismatch);
        }
        let n = x.level();
        SpaceElement::from_entries(self.codomain.clone(), n, |i, j| {
            let c = nalgebra::DVector::from_column_slice(x.entry(i, j));
            (&self.coeff * c).iter().copied().collect()
        })
    }

    /// Realization of `φ_n(x)` computed directly from domain coordinates.
    pub(crate) fn amplified_matrix(&self, coords: &[C64], n: usize) -> CMat {
        let k = self.domain.dim();
        let m = self.codomain.ambient_dim();
        let mut out = CMat::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let start = (i * n + j) * k;
                let block = self.image_of(&coords[start..start + k]);
                out.view_mut((i * m, j * m), (m, m)).copy_from(&block);
            }
        }
        out
    }

    /// Extension `φ ∘ P_V` to the full ambient algebra, as images of the matrix
    /// units `E_ij` (index `i * d + j`).
    pub(crate) fn extended_unit_images(&self) -> Vec<CMat> {
        let d = self.domain.ambient_dim();
        (0..d * d)
            .map(|idx| {
                let e = linalg::matrix_unit(d, idx / d, idx % d);
                self.apply_matrix(&e)
            })
            .collect()
    }

    pub(crate) fn upper_bounds(&self) -> &UpperBounds {
        self.bounds.get_or_init(|| factor::upper_bounds(self))
    }
}
