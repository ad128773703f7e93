//! Enclosures of `||φ||_p = Σ_{n>=1} ||φ_n|| / n^p`, membership in `N^p(V, W)`
//! and estimation of the index `r_φ`.

mod index;
mod zeta;

pub use index::{index_estimate, index_estimate_from_sequence, IndexEstimate};
pub use zeta::{zeta_bracket, zeta_tail, TailBounds};

use serde::{Deserialize, Serialize};

use crate::bracket::{BoundSource, NormBracket};
use crate::error::{Error, Result};
use crate::linalg::{round_down, round_up};
use crate::linmap::LevelNormTable;

/// Exponent used by the growth certificate `||φ_n|| <= n^{p-1-ε}`.
pub const GROWTH_EPSILON: f64 = 1e-6;
/// Slack for the `||φ||_q <= ||φ||_p` comparison.
pub const INCLUSION_SLACK: f64 = 1e-9;
/// Relative width under which both sides of an inclusion are compared as values.
const INCLUSION_TIGHT: f64 = 1e-6;

/// Exponent `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NpParameter(f64);

impl NpParameter {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "p must be a finite real >= 1, got {p}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NpParameter {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<NpParameter> for f64 {
    fn from(p: NpParameter) -> f64 {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NotMember,
    MemberByTheory,
    Unknown,
}

impl Verdict {
    pub fn is_member(self) -> bool {
        matches!(self, Verdict::Member | Verdict::MemberByTheory)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NotMember => "not_member",
            Verdict::MemberByTheory => "member_by_theory",
            Verdict::Unknown => "unknown",
        }
    }
}

/// Which closed form the tail evaluation reduced to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// `||f||_p = ||f|| ζ(p)` for a functional.
    Functional,
    /// Tail `||φ_s|| Σ_{n>K} n^{-p}` from a stabilized table.
    Stabilized,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NpResult {
    pub p: NpParameter,
    pub bracket: NormBracket,
    pub verdict: Verdict,
    pub truncation_level: usize,
    pub tail_lo: f64,
    pub tail_hi: f64,
    pub closed_form: Option<ClosedForm>,
    /// Argument attached to `not_member` and `member_by_theory` verdicts.
    pub proof: Option<String>,
}

#[derive(Serialize)]
struct NpResultJson<'a> {
    p: f64,
    #[serde(serialize_with = "finite_or_null")]
    lo: f64,
    #[serde(serialize_with = "finite_or_null")]
    hi: f64,
    verdict: Verdict,
    #[serde(rename = "K")]
    k: usize,
    tail: [Option<f64>; 2],
    closed_form: Option<ClosedForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    proof: Option<&'a str>,
}

fn finite_or_null<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

impl Serialize for NpResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let finite = |x: f64| x.is_finite().then_some(x);
        NpResultJson {
            p: self.p.value(),
            lo: self.bracket.lo,
            hi: self.bracket.hi,
            verdict: self.verdict,
            k: self.truncation_level,
            tail: [finite(self.tail_lo), finite(self.tail_hi)],
            closed_form: self.closed_form,
            proof: self.proof.as_deref(),
        }
        .serialize(s)
    }
}

/// Default truncation: `max(64, 4 s)` with `s` the stabilization (or Smith) level.
pub fn default_truncation(table: &LevelNormTable) -> usize {
    let s = table.stabilization_level.unwrap_or(table.smith_level);
    (4 * s).max(64)
}

const HARMONIC_PROOF: &str = "||phi_n|| >= ||phi_1|| > 0 for every n and the harmonic series sum 1/n diverges";
const BOUNDED_PROOF: &str = "||phi_n|| <= n ||phi|| and sum n^(1-p) converges for p > 2";

/// Enclose `||φ||_p` by exact partial sums over levels `1..=K` plus a
/// certified tail.
pub fn np_norm(table: &LevelNormTable, p: NpParameter, k: usize) -> Result<NpResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("truncation level K must be at least 1".into()));
    }
    let brackets = (1..=k).map(|n| table.bracket(n)).collect::<Result<Vec<_>>>()?;
    let pv = p.value();

    if table.map().is_zero() {
        return Ok(NpResult {
            p,
            bracket: NormBracket::zero(),
            verdict: Verdict::Member,
            truncation_level: k,
            tail_lo: 0.0,
            tail_hi: 0.0,
            closed_form: Some(ClosedForm::Zero),
            proof: None,
        });
    }

    // Smallest terms first.
    let (mut part_lo, mut part_hi) = (0.0_f64, 0.0_f64);
    for (idx, b) in brackets.iter().enumerate().rev() {
        let w = ((idx + 1) as f64).powf(-pv);
        part_lo += b.lo * w;
        part_hi += b.hi * w;
    }
    let slack = k as f64 * f64::EPSILON;
    part_lo *= 1.0 - slack;
    part_hi *= 1.0 + slack;

    let lo_k = brackets[k - 1].lo;
    let base_lo = brackets[0].lo;

    if pv == 1.0 {
        let (verdict, proof) = if base_lo > 0.0 {
            (Verdict::NotMember, Some(HARMONIC_PROOF.to_string()))
        } else {
            (Verdict::Unknown, None)
        };
        let tail_lo = if base_lo > 0.0 { f64::INFINITY } else { 0.0 };
        return Ok(NpResult {
            p,
            bracket: NormBracket::new(
                round_down(part_lo + tail_lo),
                BoundSource::Monotonicity,
                f64::INFINITY,
                BoundSource::Monotonicity,
            ),
            verdict,
            truncation_level: k,
            tail_lo,
            tail_hi: f64::INFINITY,
            closed_form: None,
            proof,
        });
    }

    let tail = zeta_tail(pv, k as u64);
    let tail_lo = lo_k * tail.lo;
    let (tail_hi, hi_source, closed_form) = match table.plateau() {
        Some(plateau) => {
            let form = if table.smith_level == 1 {
                ClosedForm::Functional
            } else {
                ClosedForm::Stabilized
            };
            (plateau.hi * tail.hi, BoundSource::SmithStabilization, Some(form))
        }
        None => {
            // Every level is bounded by the certified cb bound, and for p > 2
            // also by ||φ_n|| <= n ||φ||.
            let mut best = (table.map().upper_bounds().cb * tail.hi, BoundSource::CbCap);
            if pv > 2.0 {
                let shifted = brackets[0].hi * zeta_tail(pv - 1.0, k as u64).hi;
                if shifted < best.0 {
                    best = (shifted, BoundSource::NTimesNormBound);
                }
            }
            (best.0, best.1, None)
        }
    };
    let verdict = membership(table, p);
    let proof = (verdict == Verdict::MemberByTheory).then(|| BOUNDED_PROOF.to_string());

    Ok(NpResult {
        p,
        bracket: NormBracket::new(
            round_down(part_lo + tail_lo),
            BoundSource::Monotonicity,
            round_up(part_hi + tail_hi),
            hi_source,
        ),
        verdict,
        truncation_level: k,
        tail_lo,
        tail_hi,
        closed_form,
        proof,
    })
}

/// Decide `φ ∈ N^p(V, W)` from theory and the table.
pub fn membership(table: &LevelNormTable, p: NpParameter) -> Verdict {
    let pv = p.value();
    if table.map().is_zero() {
        return Verdict::Member;
    }
    if pv > 2.0 {
        return Verdict::MemberByTheory;
    }
    if table.stabilization_level.is_some() && pv > 1.0 {
        return Verdict::Member;
    }
    let exponent = pv - 1.0 - GROWTH_EPSILON;
    if exponent > 0.0
        && table
            .entries
            .iter()
            .all(|e| e.bracket.hi <= (e.level as f64).powf(exponent))
    {
        return Verdict::Member;
    }
    if pv == 1.0 {
        return Verdict::NotMember;
    }
    Verdict::Unknown
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub p: f64,
    pub q: f64,
    pub result_p: NpResult,
    pub result_q: NpResult,
    /// `lo_q <= hi_p + slack`.
    pub bracket_ok: bool,
    /// `value_q <= value_p + slack`, checked when both brackets are tight.
    pub value_ok: Option<bool>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.bracket_ok && self.value_ok.unwrap_or(true)
    }
}

/// Check `||φ||_q <= ||φ||_p` for `1 <= p <= q`.
pub fn inclusion_check(table: &LevelNormTable, p: f64, q: f64, k: usize) -> Result<InclusionReport> {
    if !(1.0 <= p && p <= q) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= p <= q, got p = {p}, q = {q}"
        )));
    }
    let result_p = np_norm(table, NpParameter::new(p)?, k)?;
    let result_q = np_norm(table, NpParameter::new(q)?, k)?;
    let (bp, bq) = (result_p.bracket, result_q.bracket);
    let bracket_ok = bq.lo <= bp.hi + INCLUSION_SLACK;
    let value_ok = (bp.is_tight(INCLUSION_TIGHT) && bq.is_tight(INCLUSION_TIGHT))
        .then(|| bq.midpoint() <= bp.midpoint() + INCLUSION_SLACK);
    Ok(InclusionReport {
        p,
        q,
        result_p,
        result_q,
        bracket_ok,
        value_ok,
    })
}
