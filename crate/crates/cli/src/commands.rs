use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use npspace::npnorm::default_truncation;
use npspace::{
    build_level_table, catalog, index_estimate, index_estimate_from_sequence, io, np_norm, Error, LevelNormTable,
    LinearMapRep, NpParameter, OptBudget, Result, Verdict,
};
use serde::Serialize;

use crate::{EXIT_INVARIANT, EXIT_PARSE, EXIT_UNKNOWN};

const CATALOG_SCHEME: &str = "catalog:";
const SYNTHETIC_LEVELS: usize = 64;
const INDEX_LEVELS: usize = 8;

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::Io(_)
        | Error::UnknownEntry(_)
        | Error::DependentBasis { .. }
        | Error::EmptyBasis
        | Error::DimensionMismatch { .. }
        | Error::InconsistentAction { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidLevel(_)
        | Error::InsufficientTable { .. } => EXIT_PARSE,
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => 1,
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn load(uri: &str) -> Result<LinearMapRep> {
    match uri.strip_prefix(CATALOG_SCHEME) {
        Some(name) => Ok(catalog::find(name)?.map),
        None => io::load_map(Path::new(uri)),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn budget(seed: u64, restarts: Option<usize>) -> OptBudget {
    let mut b = OptBudget::with_seed(seed);
    if let Some(r) = restarts {
        b.restarts = r;
    }
    b
}

/// Without a plateau the series can only be truncated inside the table.
fn truncation(table: &LevelNormTable, k: Option<usize>) -> usize {
    k.unwrap_or_else(|| {
        if table.plateau().is_some() {
            default_truncation(table)
        } else {
            table.max_level()
        }
    })
}

/// Enough levels to reach the Smith plateau, so every later level is covered.
fn table_for(map: &LinearMapRep, max_level: Option<usize>, seed: u64) -> Result<LevelNormTable> {
    let n = max_level.unwrap_or(map.smith_level() + 2);
    build_level_table(map, n, &budget(seed, None))
}

pub fn levels(uri: &str, max_level: usize, restarts: Option<usize>, seed: u64, out: Option<&Path>) -> Result<u8> {
    let map = load(uri)?;
    let table = build_level_table(&map, max_level, &budget(seed, restarts))?;
    let mut csv = String::from("n,lo,hi,lo_source,hi_source\n");
    for e in &table.entries {
        let b = &e.bracket;
        writeln!(
            csv,
            "{},{},{},{},{}",
            e.level,
            num(b.lo),
            num(b.hi),
            b.lo_source,
            b.hi_source
        )
        .unwrap();
    }
    print!("{csv}");
    if let Some(path) = out {
        write_json(path, &table)?;
    }
    Ok(0)
}

pub fn npnorm(
    uri: &str,
    p: f64,
    k: Option<usize>,
    max_level: Option<usize>,
    seed: u64,
    strict: bool,
    out: Option<&Path>,
) -> Result<u8> {
    let p = NpParameter::new(p)?;
    let map = load(uri)?;
    let table = table_for(&map, max_level, seed)?;
    let k = truncation(&table, k);
    let r = np_norm(&table, p, k)?;
    println!("p,lo,hi,verdict");
    println!(
        "{},{},{},{}",
        num(p.value()),
        num(r.bracket.lo),
        num(r.bracket.hi),
        r.verdict.as_str()
    );
    if let Some(proof) = &r.proof {
        println!("# {proof}");
    }
    if let Some(path) = out {
        write_json(path, &r)?;
    }
    Ok(if strict && r.verdict == Verdict::Unknown {
        EXIT_UNKNOWN
    } else {
        0
    })
}

/// `"n^alpha"` -> alpha.
fn parse_synthetic(text: &str) -> Result<f64> {
    let alpha = text
        .trim()
        .strip_prefix("n^")
        .and_then(|a| a.trim().parse::<f64>().ok())
        .filter(|a| a.is_finite())
        .ok_or_else(|| Error::Parse(format!("expected `n^alpha`, got `{text}`")))?;
    Ok(alpha)
}

pub fn index(uri: Option<&str>, synthetic: Option<&str>, max_level: Option<usize>, seed: u64) -> Result<u8> {
    let est = match (uri, synthetic) {
        (_, Some(text)) => {
            let alpha = parse_synthetic(text)?;
            let n_max = max_level.unwrap_or(SYNTHETIC_LEVELS);
            let seq: Vec<(usize, f64)> = (1..=n_max).map(|n| (n, (n as f64).powf(alpha))).collect();
            index_estimate_from_sequence(&seq)?
        }
        (Some(uri), None) => {
            let map = load(uri)?;
            let table = table_for(&map, Some(max_level.unwrap_or(INDEX_LEVELS)), seed)?;
            index_estimate(&table)?
        }
        (None, None) => return Err(Error::InvalidParameter("need a map or --synthetic".into())),
    };
    println!("{}", serde_json::to_string_pretty(&est)?);
    Ok(0)
}

/// `start:stop:step`, inclusive of `stop` up to rounding. Points are
/// `start + i step` so that errors do not accumulate.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("expected start:stop:step, got `{text}`"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && step.is_finite() && start <= stop) {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

pub fn plotdata(uri: &str, grid: &str, k: Option<usize>, max_level: Option<usize>, seed: u64) -> Result<u8> {
    let grid = parse_grid(grid)?;
    let map = load(uri)?;
    let table = table_for(&map, max_level, seed)?;
    let k = truncation(&table, k);
    let mut csv = String::from("p,lo,hi\n");
    for p in grid {
        let r = np_norm(&table, NpParameter::new(p)?, k)?;
        writeln!(csv, "{},{},{}", num(p), num(r.bracket.lo), num(r.bracket.hi)).unwrap();
    }
    print!("{csv}");
    Ok(0)
}
