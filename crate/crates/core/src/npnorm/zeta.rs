use crate::linalg::{round_down, round_up};

/// Enclosure of `Σ_{n>K} n^{-p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBounds {
    pub lo: f64,
    pub hi: f64,
}

/// Certified bounds on `Σ_{n>K} n^{-p}` by integral comparison.
///
/// `n^{-p}` is convex and decreasing, so the trapezoid rule overestimates its
/// integral and the midpoint rule underestimates it:
///
/// ```text
/// ∫_{K+1}^∞ x^{-p} dx + (K+1)^{-p}/2  <=  Σ_{n>K} n^{-p}  <=  ∫_{K+1/2}^∞ x^{-p} dx
/// ```
///
/// The upper bound is also capped by the plain `∫_K^∞` comparison. For
/// `p <= 1` the series diverges and both bounds are `+inf`.
pub fn zeta_tail(p: f64, k: u64) -> TailBounds {
    if !(p > 1.0) {
        return TailBounds {
            lo: f64::INFINITY,
            hi: f64::INFINITY,
        };
    }
    if k == 0 {
        let rest = zeta_tail(p, 1);
        return TailBounds {
            lo: round_down(1.0 + rest.lo),
            hi: round_up(1.0 + rest.hi),
        };
    }
    let kf = k as f64;
    let q = p - 1.0;
    let integral_from = |x: f64| x.powf(-q) / q;
    let lo = integral_from(kf + 1.0) + 0.5 * (kf + 1.0).powf(-p);
    let hi = integral_from(kf + 0.5).min(integral_from(kf));
    TailBounds {
        lo: round_down(lo),
        hi: round_up(hi),
    }
}

/// `Σ_{n>=1} n^{-p}` enclosed as the partial sum to `terms` plus its tail.
pub fn zeta_bracket(p: f64, terms: u64) -> TailBounds {
    if !(p > 1.0) {
        return TailBounds {
            lo: f64::INFINITY,
            hi: f64::INFINITY,
        };
    }
    // Smallest terms first.
    let partial: f64 = (1..=terms).rev().map(|n| (n as f64).powf(-p)).sum();
    let tail = zeta_tail(p, terms);
    let slack = terms as f64 * f64::EPSILON * partial;
    TailBounds {
        lo: round_down(partial - slack + tail.lo),
        hi: round_up(partial + slack + tail.hi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partial sums to 10^6 with the crude `[∫_{N+1}, ∫_N]` tail.
    fn oracle(p: f64, skip: u64) -> (f64, f64) {
        let n_max = 1_000_000_u64;
        let mut s = 0.0;
        for n in (skip + 1..=n_max).rev() {
            s += (n as f64).powf(-p);
        }
        let q = p - 1.0;
        let lo = s + ((n_max + 1) as f64).powf(-q) / q;
        let hi = s + (n_max as f64).powf(-q) / q;
        (lo - 1e-13, hi + 1e-13)
    }

    #[test]
    fn full_zeta_two_contains_oracle() {
        let (olo, ohi) = oracle(2.0, 0);
        let t = zeta_tail(2.0, 0);
        assert!(t.lo <= olo && ohi <= t.hi, "{t:?} vs [{olo}, {ohi}]");
        assert!(t.lo <= 1.6449341 && 1.6449341 <= t.hi);
    }

    #[test]
    fn zeta_three_minus_one() {
        let (olo, ohi) = oracle(3.0, 1);
        let t = zeta_tail(3.0, 1);
        assert!(t.lo <= olo && ohi <= t.hi, "{t:?}");
        assert!(t.lo <= 0.2020569 && 0.2020569 <= t.hi);
    }

    #[test]
    fn tail_vanishes() {
        let a = zeta_tail(2.0, 10);
        let b = zeta_tail(2.0, 10_000);
        assert!(b.hi < a.hi && b.hi - b.lo < a.hi - a.lo);
        assert!(b.hi < 1e-3 && b.hi - b.lo < 1e-11);
    }

    #[test]
    fn divergent_tail_is_infinite() {
        assert_eq!(zeta_tail(1.0, 5).hi, f64::INFINITY);
        assert_eq!(zeta_tail(0.5, 0).lo, f64::INFINITY);
    }

    #[test]
    fn bracket_contains_oracle_sums() {
        for p in [1.5, 2.0, 3.0, 4.5] {
            let (olo, ohi) = oracle(p, 0);
            let z = zeta_bracket(p, 64);
            assert!(z.lo <= ohi && olo <= z.hi, "p = {p}: {z:?} vs [{olo}, {ohi}]");
        }
    }
}
