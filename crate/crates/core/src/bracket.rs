use serde::{Deserialize, Serialize};
use std::fmt;

/// Where a bound in a [`NormBracket`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    ExactSvd,
    Optimizer,
    NTimesNormBound,
    SmithStabilization,
    CbCap,
    TransposeFactorization,
    CoefficientRelaxation,
    Monotonicity,
    TrivialZero,
}

impl BoundSource {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundSource::ExactSvd => "exact_svd",
            BoundSource::Optimizer => "optimizer",
            BoundSource::NTimesNormBound => "n_times_norm_bound",
            BoundSource::SmithStabilization => "smith_stabilization",
            BoundSource::CbCap => "cb_cap",
            BoundSource::TransposeFactorization => "transpose_factorization",
            BoundSource::CoefficientRelaxation => "coefficient_relaxation",
            BoundSource::Monotonicity => "monotonicity",
            BoundSource::TrivialZero => "trivial_zero",
        }
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Certified enclosure `lo <= value <= hi` of a norm value.
///
/// `hi` may be `+inf`; it serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lo: f64,
    #[serde(with = "crate::io::inf_as_null")]
    pub hi: f64,
    pub lo_source: BoundSource,
    pub hi_source: BoundSource,
}

/// Relative width under which a bracket counts as exact.
pub const EXACT_WIDTH: f64 = 1e-9;

impl NormBracket {
    pub fn new(lo: f64, lo_source: BoundSource, hi: f64, hi_source: BoundSource) -> Self {
        debug_assert!(lo >= 0.0 && lo <= hi, "malformed bracket [{lo}, {hi}]");
        Self {
            lo,
            hi,
            lo_source,
            hi_source,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, BoundSource::TrivialZero, 0.0, BoundSource::TrivialZero)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `hi - lo <= tol * max(1, hi)`.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.hi.is_finite() && self.width() <= tol * self.hi.max(1.0)
    }

    pub fn is_exact(&self) -> bool {
        self.is_tight(EXACT_WIDTH)
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lo - slack && value <= self.hi + slack
    }

    pub fn intersects(&self, other: &NormBracket, slack: f64) -> bool {
        self.lo <= other.hi + slack && other.lo <= self.hi + slack
    }

    pub fn scaled(&self, factor: f64) -> Self {
        debug_assert!(factor >= 0.0);
        Self {
            lo: self.lo * factor,
            hi: self.hi * factor,
            ..*self
        }
    }
}

impl fmt::Display for NormBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.12}, {:.12}] ({} / {})",
            self.lo, self.hi, self.lo_source, self.hi_source
        )
    }
}
