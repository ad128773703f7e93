//! Multi-restart alternating maximization of `||φ_n(x)||` over the unit ball
//! of `M_n(V)`.
//!
//! With unit vectors `u, v` fixed, `x ↦ Re <u, φ_n(x) v>` is linear, so its
//! maximizer over the ball is the polar factor of its representer (projected
//! back onto `M_n(V)` when `V` is a proper subspace). With `x` fixed, the best
//! `u, v` is the top singular pair of `φ_n(x)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::opspace::SpaceElement;

/// Alternations of subspace projection and singular-value clipping.
const PROJECTION_ROUNDS: usize = 100;
const PROJECTION_TOL: f64 = 1e-12;
/// Consecutive sub-tolerance improvements before a restart stops.
const STALL_LIMIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptBudget {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iter: 200,
            tol: 1e-11,
            seed: 0,
        }
    }
}

impl OptBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// A unit-ball element of `M_n(V)` certifying `||φ_n|| >= value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    #[serde(with = "crate::io::complex_vec")]
    pub coords: Vec<C64>,
    pub value: f64,
}

impl Witness {
    /// Recompute `||φ_n(x)|| / max(1, ||x||)`, a lower bound for `||φ_n||`.
    pub fn recheck(&self, map: &LinearMapRep) -> Result<f64> {
        let x = SpaceElement::new(map.domain().clone(), self.level, self.coords.clone())?;
        let norm = x.level_norm();
        let image = linalg::spectral_norm(&map.amplified_matrix(&self.coords, self.level));
        Ok(image / norm.max(1.0))
    }

    pub fn domain_norm(&self, map: &LinearMapRep) -> Result<f64> {
        Ok(SpaceElement::new(map.domain().clone(), self.level, self.coords.clone())?.level_norm())
    }

    /// Same witness at level `n + 1`, padded with zeros.
    pub fn padded(&self, map: &LinearMapRep) -> Self {
        let x = SpaceElement::new(map.domain().clone(), self.level, self.coords.clone())
            .expect("witness matches its map")
            .pad_zero();
        Self {
            level: self.level + 1,
            coords: x.into_coords(),
            value: self.value,
        }
    }
}

/// Best witness over all restarts; `None` for the zero map.
pub(crate) fn maximize(map: &LinearMapRep, n: usize, budget: &OptBudget) -> Result<Option<Witness>> {
    if n == 0 {
        return Err(Error::InvalidLevel(0));
    }
    if map.is_zero() {
        return Ok(None);
    }
    let restarts = budget.restarts.max(1);
    let runs: Vec<Witness> = (0..restarts)
        .into_par_iter()
        .map(|r| single_restart(map, n, budget, stream_seed(budget.seed, n, r)))
        .collect();
    // Merge in restart order so that ties resolve identically on any thread count.
    let best = runs
        .into_iter()
        .reduce(|best, w| if w.value > best.value { w } else { best });
    Ok(best)
}

fn stream_seed(seed: u64, level: usize, restart: usize) -> u64 {
    let mut z = seed
        ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (restart as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Iterate {
    coords: Vec<C64>,
    value: f64,
    u: linalg::CVec,
    v: linalg::CVec,
}

fn single_restart(map: &LinearMapRep, n: usize, budget: &OptBudget, seed: u64) -> Witness {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = SpaceElement::random(map.domain().clone(), n, &mut rng);
    let norm = start.level_norm();
    let coords = start.scale_real(1.0 / norm).into_coords();
    let mut it = evaluate(map, n, normalize(map, n, coords));

    let mut stalls = 0;
    for _ in 0..budget.max_iter {
        let cand = evaluate(map, n, ball_maximizer(map, n, &it.u, &it.v));
        if cand.value <= it.value {
            break;
        }
        let gain = cand.value - it.value;
        it = cand;
        if gain < budget.tol {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Witness {
        level: n,
        coords: it.coords,
        value: it.value,
    }
}

/// Scale coordinates so that the realized element has norm at most one, and
/// report `||φ_n(x)||` as the certified value.
fn evaluate(map: &LinearMapRep, n: usize, coords: Vec<C64>) -> Iterate {
    let image = map.amplified_matrix(&coords, n);
    let (value, u, v) = linalg::top_singular_pair(&image);
    Iterate { coords, value, u, v }
}

fn normalize(map: &LinearMapRep, n: usize, coords: Vec<C64>) -> Vec<C64> {
    let x = SpaceElement::new(map.domain().clone(), n, coords).expect("coordinate count matches level");
    let norm = x.level_norm();
    if norm > 1.0 {
        x.scale_real(1.0 / norm).into_coords()
    } else {
        x.into_coords()
    }
}

/// Maximize `Re <u, φ_n(x) v>` over the unit ball of `M_n(V)`.
fn ball_maximizer(map: &LinearMapRep, n: usize, u: &linalg::CVec, v: &linalg::CVec) -> Vec<C64> {
    let domain = map.domain();
    let (d, m, k) = (domain.ambient_dim(), map.codomain().ambient_dim(), domain.dim());

    // Linear functional in coordinates: h[i, j, s] = u_i* φ(b_s) v_j.
    let mut rep = CMat::zeros(n * d, n * d);
    let mut h = vec![C64::new(0.0, 0.0); k];
    for i in 0..n {
        let ui = u.rows(i * m, m);
        for j in 0..n {
            let vj = v.rows(j * m, m);
            for (slot, img) in h.iter_mut().zip(map.basis_images()) {
                *slot = (ui.adjoint() * img * vj)[(0, 0)];
            }
            let g = domain.representer(&h);
            rep.view_mut((i * d, j * d), (d, d)).copy_from(&g);
        }
    }
    let mut x = linalg::polar_factor(&rep);
    if !domain.is_full() {
        x = project_onto_ball(map, n, x);
    }
    let elem = SpaceElement::from_realized(domain.clone(), n, &x).expect("shape matches level");
    normalize(map, n, elem.into_coords())
}

/// Alternating projection onto `M_n(V) ∩ ball`.
fn project_onto_ball(map: &LinearMapRep, n: usize, mut x: CMat) -> CMat {
    let domain = map.domain();
    let d = domain.ambient_dim();
    let project = |m: &CMat| {
        let mut out = CMat::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                let block = m.view((i * d, j * d), (d, d)).into_owned();
                out.view_mut((i * d, j * d), (d, d)).copy_from(&domain.project(&block));
            }
        }
        out
    };
    for _ in 0..PROJECTION_ROUNDS {
        let next = linalg::clip_to_unit_ball(&project(&x));
        let moved = (&next - &x).norm();
        x = next;
        if moved < PROJECTION_TOL {
            break;
        }
    }
    project(&x)
}
