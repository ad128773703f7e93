//! Built-in maps with known level norms.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{matrix_unit, CMat, C64};
use crate::linmap::LinearMapRep;
use crate::npnorm::zeta_tail;
use crate::opspace::OperatorSpace;

/// `n ↦ ||φ_n||` for a map whose norms are eventually constant: `prefix[n-1]`
/// for `n <= prefix.len()`, `plateau` afterwards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRule {
    pub prefix: Vec<f64>,
    pub plateau: f64,
}

impl LevelRule {
    pub fn constant(value: f64) -> Self {
        Self {
            prefix: Vec::new(),
            plateau: value,
        }
    }

    /// `n ↦ min(n, cap) * scale`.
    pub fn capped_linear(cap: usize, scale: f64) -> Self {
        Self {
            prefix: (1..cap).map(|n| n as f64 * scale).collect(),
            plateau: cap as f64 * scale,
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        self.prefix.get(n.wrapping_sub(1)).copied().unwrap_or(self.plateau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperCorollary,
    DerivedOracle,
    Trivial,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub map: LinearMapRep,
    pub expected_level_norms: Option<LevelRule>,
    pub provenance: Provenance,
}

fn full(d: usize) -> Arc<OperatorSpace> {
    OperatorSpace::full_matrix_algebra(d).into_shared()
}

fn entry<F>(
    name: &'static str,
    domain: &Arc<OperatorSpace>,
    codomain: &Arc<OperatorSpace>,
    f: F,
    rule: LevelRule,
    provenance: Provenance,
) -> CatalogEntry
where
    F: Fn(&CMat) -> CMat,
{
    let map =
        LinearMapRep::from_matrix_fn(domain.clone(), codomain.clone(), f, name).expect("catalog maps are consistent");
    CatalogEntry {
        name,
        map,
        expected_level_norms: Some(rule),
        provenance,
    }
}

/// Coefficients of the rank-one functional `x ↦ <a, x b>`.
pub const RANK_ONE_A: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
pub const RANK_ONE_B: [C64; 2] = [C64::new(0.6, 0.0), C64::new(0.8, 0.0)];
/// Symbol of the Schur multiplier `x ↦ A ∘ x`; positive semidefinite with
/// unit diagonal, so the multiplier is unital and completely positive.
pub const SCHUR_SYMBOL: [[f64; 2]; 2] = [[1.0, 0.5], [0.5, 1.0]];

pub fn list_entries() -> Vec<CatalogEntry> {
    let (m2, m3) = (full(2), full(3));
    let scalars = full(1);
    let diag2 = OperatorSpace::new(2, vec![matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)], "diag(M2)")
        .expect("diagonal units are independent")
        .into_shared();

    let a = nalgebra::DVector::from_row_slice(&RANK_ONE_A);
    let b = nalgebra::DVector::from_row_slice(&RANK_ONE_B);
    let rank_one_norm = a.norm() * b.norm();
    let schur = CMat::from_fn(2, 2, |i, j| C64::new(SCHUR_SYMBOL[i][j], 0.0));

    vec![
        entry(
            "zero_M2",
            &m2,
            &m2,
            |x| x.scale(0.0),
            LevelRule::constant(0.0),
            Provenance::Trivial,
        ),
        entry(
            "identity_M2",
            &m2,
            &m2,
            |x| x.clone(),
            LevelRule::constant(1.0),
            Provenance::Trivial,
        ),
        entry(
            "identity_M3",
            &m3,
            &m3,
            |x| x.clone(),
            LevelRule::constant(1.0),
            Provenance::Trivial,
        ),
        entry(
            "transpose_M2",
            &m2,
            &m2,
            |x| x.transpose(),
            LevelRule::capped_linear(2, 1.0),
            Provenance::DerivedOracle,
        ),
        entry(
            "transpose_M3",
            &m3,
            &m3,
            |x| x.transpose(),
            LevelRule::capped_linear(3, 1.0),
            Provenance::DerivedOracle,
        ),
        entry(
            "trace_M2",
            &m2,
            &scalars,
            |x| CMat::from_element(1, 1, x.trace()),
            LevelRule::constant(2.0),
            Provenance::PaperCorollary,
        ),
        entry(
            "rank_one_functional_M2",
            &m2,
            &scalars,
            move |x| CMat::from_element(1, 1, (a.adjoint() * x * &b)[(0, 0)]),
            LevelRule::constant(rank_one_norm),
            Provenance::PaperCorollary,
        ),
        entry(
            "schur_M2",
            &m2,
            &m2,
            move |x| x.component_mul(&schur),
            LevelRule::constant(1.0),
            Provenance::DerivedOracle,
        ),
        entry(
            "diagonal_restriction_M2",
            &m2,
            &diag2,
            |x| CMat::from_diagonal(&x.diagonal()),
            LevelRule::constant(1.0),
            Provenance::DerivedOracle,
        ),
    ]
}

pub fn names() -> Vec<&'static str> {
    list_entries().into_iter().map(|e| e.name).collect()
}

pub fn find(name: &str) -> Result<CatalogEntry> {
    list_entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// Evaluate the closed-form level rule termwise to `K` and close the series
/// with the plateau value times the zeta tail.
pub fn expected_np_bracket(entry: &CatalogEntry, p: f64, k: usize) -> Result<(f64, f64)> {
    let rule = entry
        .expected_level_norms
        .as_ref()
        .ok_or_else(|| Error::NoClosedForm(entry.name.to_string()))?;
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("closed forms need p > 1, got {p}")));
    }
    if k < rule.prefix.len() {
        return Err(Error::InvalidParameter(format!(
            "K = {k} is shorter than the rule prefix"
        )));
    }
    let partial: f64 = (1..=k).rev().map(|n| rule.value(n) * (n as f64).powf(-p)).sum();
    let tail = zeta_tail(p, k as u64);
    let slack = k as f64 * f64::EPSILON * partial;
    Ok((
        partial - slack + rule.plateau * tail.lo,
        partial + slack + rule.plateau * tail.hi,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_entries_present() {
        let names = names();
        for want in [
            "zero_M2",
            "identity_M2",
            "identity_M3",
            "transpose_M2",
            "transpose_M3",
            "trace_M2",
            "rank_one_functional_M2",
            "schur_M2",
            "diagonal_restriction_M2",
        ] {
            assert!(names.contains(&want), "{want}");
        }
        assert!(matches!(find("nope"), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn rules() {
        let t = find("transpose_M2").unwrap().expected_level_norms.unwrap();
        assert_eq!(
            (1..=5).map(|n| t.value(n)).collect::<Vec<_>>(),
            vec![1.0, 2.0, 2.0, 2.0, 2.0]
        );
        let id = find("identity_M2").unwrap().expected_level_norms.unwrap();
        assert_eq!(id.value(7), 1.0);
    }

    #[test]
    fn zero_bracket() {
        assert_eq!(
            expected_np_bracket(&find("zero_M2").unwrap(), 2.0, 64).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn p_must_exceed_one() {
        assert!(expected_np_bracket(&find("identity_M2").unwrap(), 1.0, 64).is_err());
    }
}
