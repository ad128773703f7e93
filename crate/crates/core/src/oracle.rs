//! Brute-force lower bounds for `||φ_n||`, independent of the alternating
//! optimizer: random unit elements of `M_n(V)` refined by random-perturbation
//! hill climbing.
//!
//! On a full domain `M_d` the climb stays on the unitary group. A convex
//! function attains its maximum over the unit ball at an extreme point, and on
//! unitaries the denominator `||x||` is constantly one, so the objective is
//! smooth where the ratio `||φ_n(x)|| / ||x||` is not. Proper subspaces climb
//! the ratio directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{self, C64};
use crate::linmap::{LevelNormTable, LinearMapRep};
use crate::opspace::SpaceElement;

pub const CLIMB_STEPS: usize = 1000;
pub const STEP_DECAY: f64 = 0.95;
const INITIAL_STEP: f64 = 0.5;
const MAX_STEP: f64 = 1.0;
/// A climb stops early once its step has shrunk below this.
const MIN_STEP: f64 = 1e-5;
/// Slack on `brute <= table hi`.
pub const UPPER_SLACK: f64 = 1e-9;
/// Relative slack on `table lo >= brute`.
pub const LOWER_REL_SLACK: f64 = 5e-3;
/// Cross-validation covers levels up to this one.
pub const MAX_CHECK_LEVEL: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct BruteResult {
    pub level: usize,
    pub value: f64,
    #[serde(serialize_with = "pairs")]
    pub witness: Vec<C64>,
}

fn pairs<S: serde::Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(), s)
}

/// Best `||φ_n(x)|| / ||x||` over `trials` random starts, each refined by up
/// to `CLIMB_STEPS` perturbations. The step shrinks by `STEP_DECAY` after a
/// rejected move and grows by the same factor after an accepted one.
pub fn brute_level_norm(map: &LinearMapRep, n: usize, trials: usize, seed: u64) -> BruteResult {
    let runs: Vec<(f64, Vec<C64>)> = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_F491_4F6C_DD1D).wrapping_add(t as u64));
            climb(map, n, &mut rng)
        })
        .collect();
    let (value, witness) = runs
        .into_iter()
        .reduce(|best, r| if r.0 > best.0 { r } else { best })
        .expect("at least one trial");
    BruteResult {
        level: n,
        value,
        witness,
    }
}

fn ratio(map: &LinearMapRep, n: usize, x: &SpaceElement) -> f64 {
    let norm = x.level_norm();
    if norm == 0.0 {
        return 0.0;
    }
    linalg::spectral_norm(&map.amplified_matrix(x.coords(), n)) / norm
}

fn climb(map: &LinearMapRep, n: usize, rng: &mut ChaCha8Rng) -> (f64, Vec<C64>) {
    let space = map.domain().clone();
    let on_unitaries = space.is_full();
    let to_unitary = |x: &SpaceElement| {
        SpaceElement::from_realized(space.clone(), n, &linalg::unitary_polar(&x.realize())).expect("same shape")
    };
    // On unitaries ||x|| = 1 and the ratio is just the image norm.
    let objective = |x: &SpaceElement| {
        if on_unitaries {
            linalg::spectral_norm(&map.amplified_matrix(x.coords(), n))
        } else {
            ratio(map, n, x)
        }
    };

    let start = SpaceElement::random(space.clone(), n, rng);
    let start = start.scale_real(1.0 / start.level_norm());
    let mut x = if on_unitaries { to_unitary(&start) } else { start };
    let mut best = objective(&x);
    let mut step = INITIAL_STEP;
    for _ in 0..CLIMB_STEPS {
        let noise = SpaceElement::random(space.clone(), n, rng);
        let moved = x
            .linear_combination(C64::new(1.0, 0.0), &noise, C64::new(step / n as f64, 0.0))
            .expect("same space");
        let cand = if on_unitaries {
            to_unitary(&moved)
        } else {
            moved.scale_real(1.0 / moved.level_norm())
        };
        let r = objective(&cand);
        if r > best {
            best = r;
            x = cand;
            step = (step / STEP_DECAY).min(MAX_STEP);
        } else {
            step *= STEP_DECAY;
            if step < MIN_STEP {
                break;
            }
        }
    }
    let norm = x.level_norm();
    let unit = if norm > 0.0 { x.scale_real(1.0 / norm) } else { x };
    // Report the value of the normalized witness itself.
    let value = ratio(map, n, &unit);
    (value, unit.into_coords())
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub brute_lo: f64,
    pub table_lo: f64,
    pub table_hi: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
    #[serde(serialize_with = "pairs")]
    pub witness: Vec<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossReport {
    pub label: String,
    pub levels: Vec<LevelCheck>,
}

impl CrossReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(|l| l.upper_ok && l.lower_ok)
    }
}

/// Compare brute-force lower bounds with the table for `n <= 4`.
pub fn cross_validate(table: &LevelNormTable, trials: usize, seed: u64) -> CrossReport {
    let map = table.map();
    let levels = table
        .entries
        .iter()
        .take(MAX_CHECK_LEVEL)
        .map(|e| {
            let brute = brute_level_norm(map, e.level, trials, seed);
            let b = e.bracket;
            LevelCheck {
                level: e.level,
                brute_lo: brute.value,
                table_lo: b.lo,
                table_hi: b.hi,
                upper_ok: brute.value <= b.hi + UPPER_SLACK,
                lower_ok: b.lo >= brute.value * (1.0 - LOWER_REL_SLACK),
                witness: brute.witness,
            }
        })
        .collect();
    CrossReport {
        label: table.label.clone(),
        levels,
    }
}
