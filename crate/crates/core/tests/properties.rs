mod common;

use common::{c, full, random_map, random_subspace, rel_close, rng};
use npspace::linalg::{self, CMat};
use npspace::npnorm::zeta_bracket;
use npspace::{
    build_level_table, catalog, cb_norm, inclusion_check, index_estimate_from_sequence, membership, np_norm,
    verify_axioms, zeta_tail, NpParameter, OptBudget, SpaceElement, Verdict,
};
use proptest::prelude::*;

fn quick() -> OptBudget {
    OptBudget {
        restarts: 4,
        ..OptBudget::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn realize_is_linear(seed in any::<u64>(), level in 1usize..4, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let v = random_subspace(2, 3, seed).into_shared();
        let mut r = rng(seed ^ 1);
        let x = SpaceElement::random(v.clone(), level, &mut r);
        let y = SpaceElement::random(v, level, &mut r);
        let a = c(re, im);
        let lhs = x.linear_combination(a, &y, c(1.0, 0.0)).unwrap().realize();
        let rhs = x.realize() * a + y.realize();
        prop_assert!(linalg::max_abs_diff(&lhs, &rhs) <= 1e-12 * linalg::max_abs(&rhs).max(1.0));
    }

    #[test]
    fn zero_padding_keeps_the_norm(seed in any::<u64>(), level in 1usize..4) {
        let v = random_subspace(3, 2, seed).into_shared();
        let x = SpaceElement::random(v, level, &mut rng(seed));
        let padded = x.pad_zero();
        prop_assert_eq!(padded.level(), level + 1);
        prop_assert!(rel_close(padded.level_norm(), x.level_norm(), 1e-12));
    }

    #[test]
    fn direct_sums_take_the_max(seed in any::<u64>(), m in 1usize..3, n in 1usize..3) {
        let v = random_subspace(2, 2, seed).into_shared();
        let mut r = rng(seed);
        let x = SpaceElement::random(v.clone(), m, &mut r);
        let y = SpaceElement::random(v, n, &mut r);
        let s = x.direct_sum(&y).unwrap().level_norm();
        prop_assert!(rel_close(s, x.level_norm().max(y.level_norm()), 1e-12));
    }

    #[test]
    fn scalar_matrices_contract(seed in any::<u64>(), n in 1usize..4, p in 1usize..4) {
        let v = full(2);
        let mut r = rng(seed);
        let x = SpaceElement::random(v, n, &mut r);
        let alpha = linalg::random_matrix(p, n, &mut r);
        let beta = linalg::random_matrix(n, p, &mut r);
        let lhs = x.sandwich(&alpha, &beta).unwrap().level_norm();
        let rhs = linalg::spectral_norm(&alpha) * x.level_norm() * linalg::spectral_norm(&beta);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn zeta_tails_refine_monotonically(p in 1.05..6.0f64, k in 0u64..200) {
        let here = zeta_tail(p, k);
        let next = zeta_tail(p, k + 1);
        let term = ((k + 1) as f64).powf(-p);
        prop_assert!(here.lo <= here.hi);
        // Peeling one term off keeps both sides consistent.
        prop_assert!(next.lo + term >= here.lo * (1.0 - 1e-14));
        prop_assert!(next.hi + term <= here.hi * (1.0 + 1e-14));
    }

    #[test]
    fn zeta_brackets_nest(p in 1.1..5.0f64, terms in 1u64..300) {
        let a = zeta_bracket(p, terms);
        let b = zeta_bracket(p, terms * 2);
        prop_assert!(a.lo <= b.hi && b.lo <= a.hi);
        // Up to the rounding slack, which grows with the number of terms.
        prop_assert!(b.hi - b.lo <= (a.hi - a.lo) + 1e-12);
    }

    #[test]
    fn synthetic_index_recovers_exponent(alpha in 0.0..3.0f64, scale in 0.1..10.0f64) {
        let seq: Vec<(usize, f64)> = (1..=32).map(|n| (n, scale * (n as f64).powf(alpha))).collect();
        let est = index_estimate_from_sequence(&seq).unwrap();
        prop_assert!((est.alpha_hat - alpha).abs() < 1e-9);
        prop_assert!((est.r_hat - (alpha + 1.0).max(1.0)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn map_scaling_scales_every_bracket(idx in 0usize..9, re in -4.0..4.0f64, im in -4.0..4.0f64) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let entry = &catalog::list_entries()[idx];
        let factor = c(re, im);
        let base = build_level_table(&entry.map, 3, &quick()).unwrap();
        let scaled = build_level_table(&entry.map.scaled(factor), 3, &quick()).unwrap();
        let k = factor.norm();
        for (a, b) in base.entries.iter().zip(&scaled.entries) {
            prop_assert!(rel_close(b.bracket.lo, k * a.bracket.lo, 1e-9));
            prop_assert!(rel_close(b.bracket.hi, k * a.bracket.hi, 1e-9));
        }
        let p = NpParameter::new(2.5).unwrap();
        let (x, y) = (np_norm(&base, p, 64).unwrap().bracket, np_norm(&scaled, p, 64).unwrap().bracket);
        prop_assert!(rel_close(y.lo, k * x.lo, 1e-9) && rel_close(y.hi, k * x.hi, 1e-9));
    }

    #[test]
    fn random_maps_respect_inclusion(seed in any::<u64>(), p in 1.1..4.0f64, dq in 0.0..3.0f64) {
        let table = build_level_table(&random_map(2, seed), 4, &quick()).unwrap();
        let report = inclusion_check(&table, p, p + dq, 64).unwrap();
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn truncation_refines_np_brackets(idx in 0usize..9, p in 1.2..5.0f64) {
        let entry = &catalog::list_entries()[idx];
        let table = build_level_table(&entry.map, 4, &quick()).unwrap();
        let p = NpParameter::new(p).unwrap();
        let mut prev = np_norm(&table, p, 8).unwrap().bracket;
        for k in [16, 32, 64, 128] {
            let cur = np_norm(&table, p, k).unwrap().bracket;
            prop_assert!(cur.lo >= prev.lo * (1.0 - 1e-12));
            prop_assert!(cur.hi <= prev.hi * (1.0 + 1e-12));
            prev = cur;
        }
    }
}

#[test]
fn catalog_np_brackets_contain_closed_forms() {
    for entry in catalog::list_entries() {
        let table = build_level_table(&entry.map, 4, &OptBudget::default()).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let got = np_norm(&table, NpParameter::new(p).unwrap(), 64).unwrap().bracket;
            let (lo, hi) = catalog::expected_np_bracket(&entry, p, 64).unwrap();
            assert!(
                got.lo <= hi + 1e-9 && lo <= got.hi + 1e-9,
                "{} p={p}: {got} vs [{lo}, {hi}]",
                entry.name
            );
        }
    }
}

#[test]
fn triangle_inequality_on_catalog_pairs() {
    let entries: Vec<_> = catalog::list_entries();
    let p = NpParameter::new(2.0).unwrap();
    let mut checked = 0;
    for a in &entries {
        for b in &entries {
            if !a.map.domain().same_as(b.map.domain()) || !a.map.codomain().same_as(b.map.codomain()) {
                continue;
            }
            let sum = a.map.add(&b.map).unwrap();
            let ta = build_level_table(&a.map, 4, &quick()).unwrap();
            let tb = build_level_table(&b.map, 4, &quick()).unwrap();
            let ts = build_level_table(&sum, 4, &quick()).unwrap();
            let (ra, rb, rs) = (
                np_norm(&ta, p, 64).unwrap(),
                np_norm(&tb, p, 64).unwrap(),
                np_norm(&ts, p, 64).unwrap(),
            );
            // The sum's lower bound must stay below the summands' upper bounds.
            assert!(
                rs.bracket.lo <= ra.bracket.hi + rb.bracket.hi + 1e-8,
                "{} + {}: {} > {} + {}",
                a.name,
                b.name,
                rs.bracket,
                ra.bracket,
                rb.bracket
            );
            checked += 1;
        }
    }
    assert!(checked >= 16);
}

#[test]
fn stabilized_tables_obey_the_cb_bound() {
    // ||φ||_p <= ||φ||_cb ζ(p) once the levels are pinned.
    for entry in catalog::list_entries() {
        let table = build_level_table(&entry.map, 4, &OptBudget::default()).unwrap();
        if table.stabilization_level.is_none() {
            continue;
        }
        let cb = cb_norm(&entry.map, &OptBudget::default()).unwrap().bracket;
        for p in [1.5, 2.0, 4.0] {
            let got = np_norm(&table, NpParameter::new(p).unwrap(), 64).unwrap().bracket;
            assert!(got.hi <= cb.hi * zeta_bracket(p, 64).hi + 1e-9, "{} p={p}", entry.name);
        }
    }
}

#[test]
fn full_matrix_codomains_are_members_for_every_p_above_one() {
    for entry in catalog::list_entries().into_iter().filter(|e| e.map.full_codomain()) {
        let table = build_level_table(&entry.map, 4, &OptBudget::default()).unwrap();
        for p in [1.01, 1.5, 2.0, 3.0, 10.0] {
            let v = membership(&table, NpParameter::new(p).unwrap());
            assert!(v.is_member(), "{} p={p}: {v:?}", entry.name);
        }
    }
}

#[test]
fn axioms_hold_on_random_subspaces() {
    for seed in 0..4 {
        let v = random_subspace(3, 4, seed).into_shared();
        let report = verify_axioms(&v, 40, seed);
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn subspace_domains_get_consistent_brackets() {
    // φ(x) = x restricted to a random 2-dimensional subspace of M_2.
    let v = random_subspace(2, 2, 17).into_shared();
    let w = full(2);
    let map = npspace::LinearMapRep::from_matrix_fn(v, w, |x: &CMat| x.clone(), "inclusion").unwrap();
    let table = build_level_table(&map, 3, &OptBudget::default()).unwrap();
    for e in &table.entries {
        // A complete isometry: every level has norm one.
        assert!(e.bracket.contains(1.0, 1e-6), "{}", e.bracket);
    }
    assert_eq!(membership(&table, NpParameter::new(1.0).unwrap()), Verdict::NotMember);
}
