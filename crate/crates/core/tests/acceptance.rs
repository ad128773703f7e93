//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{full, random_map, random_subspace, zeta_oracle};
use npspace::catalog::{self, CatalogEntry};
use npspace::oracle::brute_level_norm;
use npspace::{
    base_norm, build_level_table, inclusion_check, index_estimate_from_sequence, membership, np_norm, verify_axioms,
    LevelNormTable, NpParameter, OptBudget, Verdict,
};
use serde_json::{json, Value};

const AXIOM_SAMPLES: usize = 200;
const AXIOM_SECONDS: u64 = 10;
const GROWTH_SECONDS: u64 = 60;
const GROWTH_SLACK: f64 = 1e-9;
const SMITH_REL_TOL: f64 = 5e-3;
const ORACLE_GAP: f64 = 1e-3;
const THEORY_SLACK: f64 = 1e-9;
const WIDTH_TOL: f64 = 1e-5;
const INCLUSION_SLACK: f64 = 1e-8;
const INDEX_TOL: f64 = 0.05;
const K: usize = 64;
const SEED: u64 = 20;

struct Outcome {
    ok: bool,
    detail: String,
    output: Value,
}

impl Outcome {
    fn new(failures: Vec<String>, summary: String, output: Value) -> Self {
        let ok = failures.is_empty();
        let detail = if ok { summary } else { failures.join("; ") };
        Outcome { ok, detail, output }
    }
}

fn tables(max_level: usize) -> Vec<(CatalogEntry, LevelNormTable)> {
    catalog::list_entries()
        .into_iter()
        .map(|e| {
            let t = build_level_table(&e.map, max_level, &OptBudget::with_seed(SEED)).unwrap();
            (e, t)
        })
        .collect()
}

fn axioms() -> Outcome {
    let start = Instant::now();
    let spaces = [
        full(2),
        full(3),
        random_subspace(2, 2, SEED).into_shared(),
        random_subspace(3, 2, SEED + 1).into_shared(),
    ];
    let mut failures = Vec::new();
    for v in &spaces {
        let report = verify_axioms(v, AXIOM_SAMPLES, SEED);
        if !report.passed() {
            failures.push(format!("{}: {:?}", v.label(), report));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(AXIOM_SECONDS) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        failures,
        format!("4 spaces x {AXIOM_SAMPLES} samples, no violations, {elapsed:.2?}"),
        Value::Null,
    )
}

fn growth_bound() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut out = Vec::new();
    for (e, t) in tables(4) {
        let base = base_norm(&e.map);
        for entry in &t.entries {
            let cap = entry.level as f64 * base.hi + GROWTH_SLACK;
            if entry.bracket.lo > cap {
                failures.push(format!("{} n={}: {} > {}", e.name, entry.level, entry.bracket.lo, cap));
            }
        }
        out.push(json!({"map": e.name, "base": base, "table": t}));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(GROWTH_SECONDS) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        failures,
        format!("lo(n) <= n ||phi|| for all catalog maps, n <= 4, {elapsed:.2?}"),
        json!(out),
    )
}

fn monotone() -> Outcome {
    let mut failures = Vec::new();
    let mut out = Vec::new();
    for (e, t) in tables(6) {
        let lo: Vec<f64> = t.entries.iter().map(|x| x.bracket.lo).collect();
        if lo.windows(2).any(|w| w[1] < w[0]) {
            failures.push(format!("{}: {:?}", e.name, lo));
        }
        out.push(json!({"map": e.name, "lo": lo}));
    }
    Outcome::new(failures, "lower bounds nondecreasing in n".into(), json!(out))
}

fn smith() -> Outcome {
    let mut maps: Vec<_> = catalog::list_entries()
        .into_iter()
        .filter(|e| e.map.full_codomain())
        .map(|e| e.map)
        .collect();
    for seed in 0..3 {
        maps.push(random_map(2, SEED + seed));
    }
    maps.push(random_map(3, SEED));
    let mut failures = Vec::new();
    let mut out = Vec::new();
    let mut worst = 0f64;
    for map in &maps {
        let m = map.smith_level();
        let t = build_level_table(map, m + 2, &OptBudget::with_seed(SEED)).unwrap();
        for n in m..=m + 2 {
            let b = t.bracket(n).unwrap();
            let rel = (b.hi - b.lo) / b.hi.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            if rel > SMITH_REL_TOL {
                failures.push(format!("{} n={n}: {b}", map.label()));
            }
        }
        out.push(json!({"map": map.label(), "table": t}));
    }
    Outcome::new(
        failures,
        format!("{} maps, worst relative gap {worst:.3e}", maps.len()),
        json!(out),
    )
}

fn transpose() -> Outcome {
    let entry = catalog::find("transpose_M2").unwrap();
    let t = build_level_table(&entry.map, 4, &OptBudget::with_seed(SEED)).unwrap();
    let expected = [1.0, 2.0, 2.0, 2.0];
    let mut failures = Vec::new();
    let mut oracle = Vec::new();
    for (n, &value) in (1..=4).zip(&expected) {
        let trials = if n <= 2 { 2000 } else { 500 };
        let brute = brute_level_norm(&entry.map, n, trials, SEED).value;
        let hi = t.bracket(n).unwrap().hi;
        if brute < value - ORACLE_GAP {
            failures.push(format!("oracle n={n}: {brute}"));
        }
        if hi > value + THEORY_SLACK {
            failures.push(format!("hi n={n}: {hi}"));
        }
        oracle.push(json!({"level": n, "oracle": brute, "hi": hi}));
    }
    let (z_lo, z_hi) = zeta_oracle(3.0);
    let (v_lo, v_hi) = (1.0 + 2.0 * (z_lo - 1.0), 1.0 + 2.0 * (z_hi - 1.0));
    let r = np_norm(&t, NpParameter::new(3.0).unwrap(), K).unwrap();
    if r.bracket.lo > v_hi || r.bracket.hi < v_lo {
        failures.push(format!("N^3 bracket {} misses [{v_lo}, {v_hi}]", r.bracket));
    }
    if r.bracket.width() > WIDTH_TOL {
        failures.push(format!("N^3 width {}", r.bracket.width()));
    }
    let summary = format!(
        "levels (1,2,2,2), ||T||_3 in {} (width {:.1e})",
        r.bracket,
        r.bracket.width()
    );
    Outcome::new(failures, summary, json!({"levels": oracle, "np3": r}))
}

fn functional() -> Outcome {
    let entry = catalog::find("trace_M2").unwrap();
    let t = build_level_table(&entry.map, 4, &OptBudget::with_seed(SEED)).unwrap();
    let mut failures = Vec::new();
    let mut out = Vec::new();
    for p in [2.0, 3.0] {
        let (z_lo, z_hi) = zeta_oracle(p);
        let r = np_norm(&t, NpParameter::new(p).unwrap(), K).unwrap();
        let b = r.bracket;
        if b.lo > 2.0 * z_hi || b.hi < 2.0 * z_lo {
            failures.push(format!("p={p}: {b} misses 2 zeta"));
        }
        if b.width() > WIDTH_TOL * b.hi {
            failures.push(format!("p={p}: relative width {}", b.width() / b.hi));
        }
        out.push(json!(r));
    }
    Outcome::new(failures, "||tr||_p = 2 zeta(p) at p = 2, 3".into(), json!(out))
}

fn inclusion() -> Outcome {
    let mut failures = Vec::new();
    let mut out = Vec::new();
    let budget = OptBudget {
        restarts: 4,
        ..OptBudget::with_seed(SEED)
    };
    for seed in 0..20 {
        let t = build_level_table(&random_map(2, seed), 4, &budget).unwrap();
        for (p, q) in [(2.1, 3.0), (2.5, 4.0), (3.0, 5.0)] {
            let r = inclusion_check(&t, p, q, K).unwrap();
            if r.result_q.bracket.lo > r.result_p.bracket.hi + INCLUSION_SLACK {
                failures.push(format!(
                    "seed {seed} ({p},{q}): {} vs {}",
                    r.result_q.bracket, r.result_p.bracket
                ));
            }
            out.push(json!(r));
        }
    }
    Outcome::new(failures, "20 random maps x 3 (p,q) pairs".into(), json!(out))
}

fn bounded_members() -> Outcome {
    let p = NpParameter::new(2.1).unwrap();
    let mut failures = Vec::new();
    let mut out = Vec::new();
    for (e, t) in tables(4) {
        let r = np_norm(&t, p, K).unwrap();
        if !matches!(r.verdict, Verdict::Member | Verdict::MemberByTheory) || !r.bracket.hi.is_finite() {
            failures.push(format!("{}: {:?} {}", e.name, r.verdict, r.bracket));
        }
        out.push(json!({"map": e.name, "result": r}));
    }
    Outcome::new(
        failures,
        "every catalog map is in N^2.1 with finite hi".into(),
        json!(out),
    )
}

fn trivial_n1() -> Outcome {
    let p = NpParameter::new(1.0).unwrap();
    let mut failures = Vec::new();
    let mut out = Vec::new();
    for (e, t) in tables(4) {
        let r = np_norm(&t, p, K).unwrap();
        let ok = if e.map.is_zero() {
            r.verdict == Verdict::Member && r.bracket.lo == 0.0 && r.bracket.hi == 0.0
        } else {
            r.verdict == Verdict::NotMember && r.proof.is_some() && membership(&t, p) == Verdict::NotMember
        };
        if !ok {
            failures.push(format!("{}: {:?} {}", e.name, r.verdict, r.bracket));
        }
        out.push(json!({"map": e.name, "result": r}));
    }
    Outcome::new(
        failures,
        "nonzero maps not in N^1, zero map has norm 0".into(),
        json!(out),
    )
}

fn index() -> Outcome {
    let mut failures = Vec::new();
    let mut out = Vec::new();
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let seq: Vec<(usize, f64)> = (1..=K).map(|n| (n, (n as f64).powf(alpha))).collect();
        let est = index_estimate_from_sequence(&seq).unwrap();
        let want = (alpha + 1.0).max(1.0);
        if (est.r_hat - want).abs() > INDEX_TOL {
            failures.push(format!("alpha={alpha}: r_hat {}", est.r_hat));
        }
        out.push(json!({"alpha": alpha, "estimate": est}));
    }
    Outcome::new(
        failures,
        "r_hat = max(1, alpha + 1) for alpha in {0, 0.5, 1, 2}".into(),
        json!(out),
    )
}

type Criterion = (usize, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    (1, "matrix norm axioms", axioms),
    (2, "level growth bound", growth_bound),
    (3, "monotone levels", monotone),
    (4, "Smith stabilization", smith),
    (5, "transpose ground truth", transpose),
    (6, "functional closed form", functional),
    (7, "inclusion", inclusion),
    (8, "bounded maps above p = 2", bounded_members),
    (9, "N^1 is trivial", trivial_n1),
    (10, "index estimator", index),
];

fn report(id: usize, name: &str, ok: bool, detail: &str) {
    println!("{} criterion {id} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut first_outputs = Vec::new();
    for (id, name, run) in CRITERIA {
        let outcome = run();
        report(id, name, outcome.ok, &outcome.detail);
        all_ok &= outcome.ok;
        if id >= 2 {
            first_outputs.push((id, serde_json::to_string(&outcome.output).unwrap()));
        }
    }

    let mut differing = Vec::new();
    for (id, first) in &first_outputs {
        let (_, _, run) = CRITERIA[id - 1];
        if serde_json::to_string(&run().output).unwrap() != *first {
            differing.push(id.to_string());
        }
    }
    let ok = differing.is_empty();
    let detail = if ok {
        format!(
            "criteria 2-10 reproduce byte-identical JSON ({} bytes)",
            first_outputs.iter().map(|o| o.1.len()).sum::<usize>()
        )
    } else {
        format!("output changed for criteria {}", differing.join(", "))
    };
    report(11, "determinism", ok, &detail);
    all_ok &= ok;

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
