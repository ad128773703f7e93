//! Property suites behind `npspace verify`.

use std::path::Path;

use npspace::linalg;
use npspace::oracle::cross_validate;
use npspace::{
    base_norm, build_level_table, catalog, inclusion_check, make_space, verify_axioms, OperatorSpace, OptBudget, Result,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::write_json;
use crate::{Suite, EXIT_INVARIANT};

const AXIOM_SAMPLES: usize = 200;
const TABLE_LEVELS: usize = 4;
const ORACLE_TRIALS: usize = 40;
const GROWTH_SLACK: f64 = 1e-9;
const RULE_SLACK: f64 = 1e-9;
const K: usize = 64;
const PAIRS: [(f64, f64); 5] = [(1.5, 2.0), (2.0, 3.0), (2.1, 3.0), (2.5, 4.0), (3.0, 5.0)];

#[derive(Serialize)]
struct SuiteReport {
    suite: &'static str,
    seed: u64,
    passed: bool,
    failures: Vec<String>,
    details: Vec<Value>,
}

pub fn run(suite: Suite, seed: u64, out: Option<&Path>) -> Result<u8> {
    let (name, (failures, details)) = match suite {
        Suite::Axioms => ("axioms", axioms(seed)?),
        Suite::Inclusions => ("inclusions", inclusions(seed)?),
        Suite::Bounds => ("bounds", bounds(seed)?),
    };
    let report = SuiteReport {
        suite: name,
        seed,
        passed: failures.is_empty(),
        failures,
        details,
    };
    for f in &report.failures {
        eprintln!("FAIL {f}");
    }
    println!(
        "{} {}: {} checks",
        if report.passed { "PASS" } else { "FAIL" },
        name,
        report.details.len()
    );
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    Ok(if report.passed { 0 } else { EXIT_INVARIANT })
}

type Findings = (Vec<String>, Vec<Value>);

fn random_subspace(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<OperatorSpace> {
    let basis = (0..k).map(|_| linalg::random_matrix(d, d, rng)).collect();
    make_space(d, basis, format!("random_{k}d_in_M{d}"))
}

fn axioms(seed: u64) -> Result<Findings> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces = vec![
        OperatorSpace::full_matrix_algebra(2),
        OperatorSpace::full_matrix_algebra(3),
        random_subspace(2, 2, &mut rng)?,
        random_subspace(3, 2, &mut rng)?,
    ];
    let (mut failures, mut details) = (Vec::new(), Vec::new());
    for v in spaces {
        let report = verify_axioms(&v.into_shared(), AXIOM_SAMPLES, seed);
        if !report.passed() {
            failures.push(format!(
                "{}: M1 {} / M2 {} failures",
                report.space, report.m1.failures, report.m2.failures
            ));
        }
        details.push(json!(report));
    }
    Ok((failures, details))
}

fn inclusions(seed: u64) -> Result<Findings> {
    let (mut failures, mut details) = (Vec::new(), Vec::new());
    for entry in catalog::list_entries() {
        let table = build_level_table(&entry.map, TABLE_LEVELS, &OptBudget::with_seed(seed))?;
        for (p, q) in PAIRS {
            let r = inclusion_check(&table, p, q, K)?;
            if !r.passed() {
                failures.push(format!(
                    "{} (p={p}, q={q}): {} vs {}",
                    entry.name, r.result_q.bracket, r.result_p.bracket
                ));
            }
            details.push(json!({"map": entry.name, "p": p, "q": q, "passed": r.passed()}));
        }
    }
    Ok((failures, details))
}

/// `lo(n) <= n ||φ||`, catalog closed forms inside the brackets, and the
/// brute-force oracle below every upper bound.
fn bounds(seed: u64) -> Result<Findings> {
    let (mut failures, mut details) = (Vec::new(), Vec::new());
    for entry in catalog::list_entries() {
        let table = build_level_table(&entry.map, TABLE_LEVELS, &OptBudget::with_seed(seed))?;
        let base = base_norm(&entry.map);
        for e in &table.entries {
            if e.bracket.lo > e.level as f64 * base.hi + GROWTH_SLACK {
                failures.push(format!(
                    "{} n={}: lo {} above n ||phi|| = {}",
                    entry.name, e.level, e.bracket.lo, base.hi
                ));
            }
            if let Some(rule) = &entry.expected_level_norms {
                if !e.bracket.contains(rule.value(e.level), RULE_SLACK) {
                    failures.push(format!(
                        "{} n={}: {} misses {}",
                        entry.name,
                        e.level,
                        e.bracket,
                        rule.value(e.level)
                    ));
                }
            }
        }
        let cross = cross_validate(&table, ORACLE_TRIALS, seed);
        if !cross.passed() {
            failures.push(format!("{}: oracle disagrees with the table", entry.name));
        }
        details.push(json!({"map": entry.name, "table": table, "oracle": cross}));
    }
    Ok((failures, details))
}
