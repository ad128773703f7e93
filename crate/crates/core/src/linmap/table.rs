use serde::Serialize;

use super::ascent::{self, OptBudget, Witness};
use super::LinearMapRep;
use crate::bracket::{BoundSource, NormBracket, EXACT_WIDTH};
use crate::error::{Error, Result};

/// Rounding slack tolerated between an optimizer value and a certified upper
/// bound before the pair is reported as inconsistent.
const CONSISTENCY_SLACK: f64 = 1e-9;

/// Bracket for `||φ_n||` plus the witness behind its lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct LevelEntry {
    pub level: usize,
    pub bracket: NormBracket,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Certified upper bound on `||φ_n||` that needs no optimization.
pub(crate) fn level_upper(map: &LinearMapRep, n: usize) -> (f64, BoundSource) {
    let ub = map.upper_bounds();
    if ub.level_one.1 == BoundSource::TrivialZero {
        return (0.0, BoundSource::TrivialZero);
    }
    let d = map.domain().ambient_dim();
    let mut best = if n == 1 {
        ub.level_one
    } else {
        (n as f64 * ub.level_one.0, BoundSource::NTimesNormBound)
    };
    let mut consider = |value: f64, source: BoundSource| {
        if value < best.0 {
            best = (value, source);
        }
    };
    consider(ub.cb, BoundSource::CbCap);
    consider(ub.transpose * n.min(d) as f64, BoundSource::TransposeFactorization);
    let m = map.smith_level();
    if n > m {
        consider(level_upper(map, m).0, BoundSource::SmithStabilization);
    }
    best
}

fn bracket_from(map: &LinearMapRep, n: usize, witness: &Option<Witness>) -> Result<NormBracket> {
    let (hi, hi_source) = level_upper(map, n);
    let Some(w) = witness else {
        return Ok(NormBracket::zero());
    };
    let lo = w.value;
    if lo > hi * (1.0 + CONSISTENCY_SLACK) + CONSISTENCY_SLACK {
        return Err(Error::Invariant(format!(
            "level {n}: optimizer value {lo} exceeds certified upper bound {hi} ({hi_source})"
        )));
    }
    Ok(NormBracket::new(lo.min(hi), BoundSource::Optimizer, hi, hi_source))
}

/// Bracket for `||φ_n||`: optimizer lower bound, best certified upper bound.
pub fn level_norm_bracket(map: &LinearMapRep, n: usize, budget: &OptBudget) -> Result<LevelEntry> {
    let witness = ascent::maximize(map, n, budget)?;
    let bracket = bracket_from(map, n, &witness)?;
    Ok(LevelEntry {
        level: n,
        bracket,
        witness,
    })
}

/// `||φ|| = ||φ_1||` with the default optimizer budget.
pub fn base_norm(map: &LinearMapRep) -> NormBracket {
    base_norm_with(map, &OptBudget::default())
}

pub fn base_norm_with(map: &LinearMapRep, budget: &OptBudget) -> NormBracket {
    level_norm_bracket(map, 1, budget)
        .expect("level 1 is valid and bounds are consistent")
        .bracket
}

/// `||φ||_cb`, evaluated at the Smith level.
#[derive(Debug, Clone, Serialize)]
pub struct CbNorm {
    pub bracket: NormBracket,
    /// Level `m` at which the bracket was computed.
    pub level: usize,
    /// `true` when the codomain is all of `M_m`; otherwise stabilization
    /// comes from the ambient inclusion `W ⊆ M_m`.
    pub full_codomain: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

pub fn cb_norm(map: &LinearMapRep, budget: &OptBudget) -> Result<CbNorm> {
    let m = map.smith_level();
    let entry = level_norm_bracket(map, m, budget)?;
    Ok(CbNorm {
        bracket: entry.bracket,
        level: m,
        full_codomain: map.full_codomain(),
        witness: entry.witness,
    })
}

/// Brackets for `||φ_1||, ..., ||φ_N||` after propagating monotonicity, the
/// `n ||φ||` bound and Smith stabilization.
#[derive(Debug, Clone, Serialize)]
pub struct LevelNormTable {
    #[serde(skip)]
    map: LinearMapRep,
    pub label: String,
    pub entries: Vec<LevelEntry>,
    /// Smallest `s` such that every `||φ_n||`, `n >= s`, is pinned inside an
    /// exact bracket.
    pub stabilization_level: Option<usize>,
    pub smith_level: usize,
    pub full_codomain: bool,
}

/// Levels beyond `smith_level + OPTIMIZED_PAST_SMITH` reuse the Smith bracket
/// instead of running the optimizer.
const OPTIMIZED_PAST_SMITH: usize = 2;

pub fn build_level_table(map: &LinearMapRep, max_level: usize, budget: &OptBudget) -> Result<LevelNormTable> {
    if max_level == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let m = map.smith_level();
    let optimized = max_level.min(m + OPTIMIZED_PAST_SMITH);
    let mut entries = (1..=optimized)
        .map(|n| level_norm_bracket(map, n, budget))
        .collect::<Result<Vec<_>>>()?;
    for n in optimized + 1..=max_level {
        let (hi, hi_source) = level_upper(map, n);
        entries.push(LevelEntry {
            level: n,
            bracket: NormBracket::new(0.0, BoundSource::TrivialZero, hi, hi_source),
            witness: None,
        });
    }
    let mut table = LevelNormTable {
        map: map.clone(),
        label: map.label().to_string(),
        entries,
        stabilization_level: None,
        smith_level: m,
        full_codomain: map.full_codomain(),
    };
    table.propagate()?;
    Ok(table)
}

impl LevelNormTable {
    pub fn map(&self) -> &LinearMapRep {
        &self.map
    }

    pub fn max_level(&self) -> usize {
        self.entries.len()
    }

    /// Bracket for `||φ_n||`. Levels beyond the table are answered from the
    /// Smith plateau when the table reaches it.
    pub fn bracket(&self, n: usize) -> Result<NormBracket> {
        if n == 0 {
            return Err(Error::InvalidLevel(0));
        }
        if n <= self.max_level() {
            return Ok(self.entries[n - 1].bracket);
        }
        self.plateau().ok_or(Error::InsufficientTable {
            needed: n,
            available: self.max_level(),
        })
    }

    /// Bracket valid for every `n >= smith_level`, if the table reaches it.
    pub fn plateau(&self) -> Option<NormBracket> {
        self.entries.get(self.smith_level - 1).map(|e| e.bracket)
    }

    fn propagate(&mut self) -> Result<()> {
        let n_levels = self.entries.len();
        let hi1 = self.entries[0].bracket.hi;

        // ||φ_n|| <= n ||φ||
        for (idx, e) in self.entries.iter_mut().enumerate() {
            let cap = (idx + 1) as f64 * hi1;
            if cap < e.bracket.hi {
                e.bracket.hi = cap;
                e.bracket.hi_source = BoundSource::NTimesNormBound;
            }
        }

        // All levels from the Smith level on share one value.
        let m = self.smith_level;
        if n_levels >= m {
            let region = &self.entries[m - 1..];
            let (lo_idx, lo) = region.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, e)| {
                if e.bracket.lo > b.1 {
                    (i, e.bracket.lo)
                } else {
                    b
                }
            });
            let hi = region.iter().fold(f64::INFINITY, |h, e| h.min(e.bracket.hi));
            let lo_witness = region[lo_idx].witness.clone();
            let lo_source = region[lo_idx].bracket.lo_source;
            for (i, e) in self.entries[m - 1..].iter_mut().enumerate() {
                if e.bracket.lo < lo {
                    e.bracket.lo = lo;
                    e.bracket.lo_source = if i == lo_idx {
                        lo_source
                    } else {
                        BoundSource::SmithStabilization
                    };
                    e.witness = lo_witness.clone();
                }
                if e.bracket.hi > hi {
                    e.bracket.hi = hi;
                    e.bracket.hi_source = BoundSource::SmithStabilization;
                }
            }
        }

        // ||φ_1|| <= ||φ_2|| <= ...: lower bounds forward, upper bounds backward.
        for n in 1..n_levels {
            let prev = self.entries[n - 1].clone();
            let e = &mut self.entries[n];
            if prev.bracket.lo > e.bracket.lo {
                e.bracket.lo = prev.bracket.lo;
                e.bracket.lo_source = BoundSource::Monotonicity;
                e.witness = prev
                    .witness
                    .as_ref()
                    .map(|w| if w.level == n { w.padded(&self.map) } else { w.clone() });
            }
        }
        for n in (0..n_levels - 1).rev() {
            let next_hi = self.entries[n + 1].bracket.hi;
            let e = &mut self.entries[n];
            if next_hi < e.bracket.hi {
                e.bracket.hi = next_hi;
                e.bracket.hi_source = BoundSource::Monotonicity;
            }
        }

        for e in &mut self.entries {
            let b = &mut e.bracket;
            if b.lo > b.hi * (1.0 + CONSISTENCY_SLACK) + CONSISTENCY_SLACK {
                return Err(Error::Invariant(format!(
                    "level {}: lower bound {} exceeds upper bound {}",
                    e.level, b.lo, b.hi
                )));
            }
            b.lo = b.lo.min(b.hi);
        }

        self.stabilization_level = if n_levels >= m {
            let hi = self.entries[m - 1].bracket.hi;
            let mut s = m;
            while s > 1 && hi - self.entries[s - 2].bracket.lo <= EXACT_WIDTH * hi.max(1.0) {
                s -= 1;
            }
            let tight = hi - self.entries[s - 1].bracket.lo <= EXACT_WIDTH * hi.max(1.0);
            Some(if tight { s } else { m })
        } else {
            None
        };
        Ok(())
    }

    /// Replace a bracket without re-propagating; used to build corrupted
    /// tables for negative-control tests.
    pub fn override_bracket(&mut self, n: usize, bracket: NormBracket) {
        self.entries[n - 1].bracket = bracket;
    }
}
