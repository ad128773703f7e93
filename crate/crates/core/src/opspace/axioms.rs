//! Randomized checks of the direct-sum (M1) and scalar-sandwich (M2) rules
//! for the matrix norms of a concrete space.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{OperatorSpace, SpaceElement};
use crate::linalg;

/// Highest matrix level sampled.
const MAX_LEVEL: usize = 4;
const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub checks: usize,
    pub failures: usize,
    /// Largest observed violation, relative to the compared magnitude.
    pub worst_violation: f64,
}

impl AxiomCheck {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: 0,
            worst_violation: 0.0,
        }
    }

    fn record(&mut self, violation: f64) {
        self.checks += 1;
        if violation > TOLERANCE {
            self.failures += 1;
        }
        self.worst_violation = self.worst_violation.max(violation);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub space: String,
    pub samples: usize,
    pub seed: u64,
    pub m1: AxiomCheck,
    pub m2: AxiomCheck,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.m1.passed() && self.m2.passed()
    }
}

/// Check M1 and M2 on `samples` random draws at levels up to 4.
pub fn verify_axioms(space: &Arc<OperatorSpace>, samples: usize, seed: u64) -> AxiomReport {
    verify_axioms_with(space, samples, seed, SpaceElement::level_norm)
}

/// Same as [`verify_axioms`] with a caller-supplied matrix norm, so broken
/// norms can be fed through the same harness.
pub fn verify_axioms_with<F>(space: &Arc<OperatorSpace>, samples: usize, seed: u64, norm: F) -> AxiomReport
where
    F: Fn(&SpaceElement) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m1 = AxiomCheck::new();
    let mut m2 = AxiomCheck::new();

    for _ in 0..samples {
        // M1: ||v ⊕ w|| = max(||v||, ||w||)
        let (a, b) = (rng.random_range(1..=MAX_LEVEL), rng.random_range(1..=MAX_LEVEL));
        let v = SpaceElement::random(space.clone(), a, &mut rng).scale_real(rng.random_range(0.1..3.0));
        let w = SpaceElement::random(space.clone(), b, &mut rng).scale_real(rng.random_range(0.1..3.0));
        let sum = v.direct_sum(&w).expect("same space");
        let expected = norm(&v).max(norm(&w));
        let got = norm(&sum);
        m1.record((got - expected).abs() / expected.max(1.0));

        // M2: ||alpha x beta|| <= ||alpha|| ||x|| ||beta||
        let (n, m) = (rng.random_range(1..=MAX_LEVEL), rng.random_range(1..=MAX_LEVEL));
        let x = SpaceElement::random(space.clone(), m, &mut rng);
        let alpha = linalg::random_matrix(n, m, &mut rng);
        let beta = linalg::random_matrix(m, n, &mut rng);
        let lhs = norm(&x.sandwich(&alpha, &beta).expect("shapes agree"));
        let rhs = linalg::spectral_norm(&alpha) * norm(&x) * linalg::spectral_norm(&beta);
        m2.record((lhs - rhs).max(0.0) / rhs.max(1.0));
    }

    AxiomReport {
        space: space.label().to_string(),
        samples,
        seed,
        m1,
        m2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::opspace::make_space;

    #[test]
    fn full_m2_passes() {
        let v = OperatorSpace::full_matrix_algebra(2).into_shared();
        let report = verify_axioms(&v, 100, 7);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.m1.checks, 100);
    }

    #[test]
    fn scalar_space_passes() {
        let v = make_space(2, vec![CMat::identity(2, 2)], "span{I}")
            .unwrap()
            .into_shared();
        assert!(verify_axioms(&v, 10, 1).passed());
    }

    #[test]
    fn frobenius_norm_breaks_m1() {
        let v = OperatorSpace::full_matrix_algebra(2).into_shared();
        let report = verify_axioms_with(&v, 20, 3, |x| x.realize().norm());
        assert!(!report.m1.passed());
        assert!(report.m1.worst_violation > 1e-3);
    }
}
