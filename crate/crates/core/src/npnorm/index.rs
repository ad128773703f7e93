use serde::Serialize;

use crate::error::{Error, Result};
use crate::linmap::LevelNormTable;

/// Relative bracket width accepted as a usable data point.
const TIGHT: f64 = 1e-3;

/// Estimated index `r = inf { p : φ ∈ N^p }` from the growth of `||φ_n||`.
#[derive(Debug, Clone, Serialize)]
pub struct IndexEstimate {
    pub r_hat: f64,
    /// Fitted exponent of `||φ_n|| ~ n^alpha`.
    pub alpha_hat: f64,
    pub fit_window: (usize, usize),
    /// RMS residual of the log-log fit.
    pub residual: f64,
}

/// Stabilized tables give `alpha = 0` and `r = 1` outright.
pub fn index_estimate(table: &LevelNormTable) -> Result<IndexEstimate> {
    if let Some(s) = table.stabilization_level {
        return Ok(IndexEstimate {
            r_hat: 1.0,
            alpha_hat: 0.0,
            fit_window: (s, table.max_level()),
            residual: 0.0,
        });
    }
    let points: Vec<(usize, f64)> = table
        .entries
        .iter()
        .filter(|e| e.bracket.is_tight(TIGHT))
        .map(|e| (e.level, e.bracket.midpoint()))
        .collect();
    index_estimate_from_sequence(&points)
}

/// Least-squares fit of `log value` against `log n` over the upper half of
/// the sequence (at least three points).
pub fn index_estimate_from_sequence(points: &[(usize, f64)]) -> Result<IndexEstimate> {
    let mut usable: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|&(n, v)| n >= 1 && v > 0.0 && v.is_finite())
        .collect();
    usable.sort_by_key(|&(n, _)| n);
    usable.dedup_by_key(|&mut (n, _)| n);
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable levels, need at least 3",
            usable.len()
        )));
    }
    let take = (usable.len() / 2).max(3);
    let window = &usable[usable.len() - take..];

    let xs: Vec<f64> = window.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, v)| v.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - alpha * x).powi(2))
        .sum();

    Ok(IndexEstimate {
        r_hat: (alpha + 1.0).max(1.0),
        alpha_hat: alpha,
        fit_window: (window[0].0, window[window.len() - 1].0),
        residual: (rss / len).sqrt(),
    })
}
