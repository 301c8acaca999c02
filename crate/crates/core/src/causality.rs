//! Variable-lag transfer entropy.
//!
//! The cause series is re-timed by a backward-looking dynamic time warping
//! path so that each effect observation is paired with the cause value that
//! best matches it within a lag band; transfer entropy is then estimated from
//! equal-frequency symbols, and its significance is judged against
//! circularly shifted, re-aligned copies of the cause.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{MonthlySeries, SeriesFrame};
use crate::error::{ensure_len, Error, Result};
use crate::rng::{derive, tag, task_rng};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    /// For each effect index t, the cause is read at t − lag_at_t[t].
    pub lag_at_t: Vec<usize>,
    pub cost: f64,
}

impl Alignment {
    pub fn modal_lag(&self) -> usize {
        let mut counts = std::collections::BTreeMap::new();
        for &l in &self.lag_at_t {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        counts.into_iter().max_by_key(|&(l, c)| (c, std::cmp::Reverse(l))).map_or(0, |(l, _)| l)
    }

    /// Cause values re-timed onto the effect's clock.
    pub fn apply(&self, cause: &[f64]) -> Vec<f64> {
        self.lag_at_t.iter().enumerate().map(|(t, &l)| cause[t - l]).collect()
    }
}

fn check_pair(cause: &[f64], effect: &[f64], min: usize) -> Result<()> {
    if cause.len() != effect.len() {
        return Err(Error::InvalidArgument("cause and effect lengths differ".into()));
    }
    ensure_len(cause.len(), min)
}

/// Unconstrained backward-looking DTW (any lag ≥ 0).
pub fn dtw_align(cause: &MonthlySeries, effect: &MonthlySeries) -> Result<Alignment> {
    let n = cause.len();
    dtw_align_band(cause.values(), effect.values(), 0, n)
}

/// DTW on z-scored series with absolute-difference cost, the path confined
/// to lags in `[min_lag, max_lag]` (the first `min_lag` effect points may
/// use any lag in `[0, t]`).
pub fn dtw_align_band(cause: &[f64], effect: &[f64], min_lag: usize, max_lag: usize) -> Result<Alignment> {
    check_pair(cause, effect, 10)?;
    stats::ensure_varying(cause, "dtw_align")?;
    stats::ensure_varying(effect, "dtw_align")?;
    if min_lag > max_lag || min_lag >= cause.len() {
        return Err(Error::InvalidArgument(format!("dtw lag band [{min_lag}, {max_lag}] is empty")));
    }
    Ok(dtw_z(&stats::zscore(cause), &stats::zscore(effect), min_lag, max_lag))
}

/// Core DTW on already standardized inputs; cell (j, l) pairs effect j with
/// cause j − l.
fn dtw_z(c: &[f64], e: &[f64], min_lag: usize, max_lag: usize) -> Alignment {
    let n = c.len();
    let w = max_lag.min(n - 1) + 1;
    let inf = f64::INFINITY;
    let mut d = vec![inf; n * w];
    let at = |j: usize, l: usize| j * w + l;
    for j in 0..n {
        // descending lag = ascending cause index, so (i-1, j) is ready
        for l in (0..w.min(j + 1)).rev() {
            if l < min_lag && j >= min_lag {
                continue;
            }
            let i = j - l;
            let cost = (c[i] - e[j]).abs();
            if i == 0 && j == 0 {
                d[0] = cost;
                continue;
            }
            let mut best = inf;
            // (i-1, j)
            if i > 0 && l + 1 < w {
                best = best.min(d[at(j, l + 1)]);
            }
            // (i, j-1)
            if j > 0 && l >= 1 {
                best = best.min(d[at(j - 1, l - 1)]);
            }
            // (i-1, j-1)
            if i > 0 && j > 0 {
                best = best.min(d[at(j - 1, l)]);
            }
            d[at(j, l)] = cost + best;
        }
    }
    let get = |i: usize, j: usize| -> f64 {
        if i > j || j - i >= w {
            inf
        } else {
            d[at(j, j - i)]
        }
    };
    let mut lag = vec![usize::MAX; n];
    let (mut i, mut j) = (n - 1 - min_lag, n - 1);
    let cost = get(i, j);
    lag[j] = j - i;
    while i > 0 || j > 0 {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let diag = get(i - 1, j - 1);
            let up = get(i - 1, j);
            let left = get(i, j - 1);
            if diag <= up && diag <= left {
                i -= 1;
                j -= 1;
            } else if up <= left {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        if lag[j] == usize::MAX {
            lag[j] = j - i;
        }
    }
    Alignment { lag_at_t: lag, cost }
}

/// Equal-frequency symbols 0..bins by rank (ties broken by position).
pub fn quantile_symbols(x: &[f64], bins: usize) -> Vec<usize> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0; n];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = r * bins / n;
    }
    out
}

/// Plug-in TE from symbol sequences, history one:
/// Σ p(y⁺, y, x) log[p(y⁺ | y, x) / p(y⁺ | y)] with x read at `x_offset`
/// (1: x_t predicts y_{t+1}; 0: x_{t+1} is paired with y_{t+1}).
pub fn transfer_entropy_symbols(x: &[usize], y: &[usize], bins: usize, x_offset: usize) -> f64 {
    let n = y.len() - 1;
    let k = bins;
    let mut joint = vec![0usize; k * k * k];
    for t in 0..n {
        let xs = if x_offset == 1 { x[t] } else { x[t + 1] };
        joint[(y[t + 1] * k + y[t]) * k + xs] += 1;
    }
    let nf = n as f64;
    let mut te = 0.0;
    for yc in 0..k {
        let mut p_y = 0usize;
        let mut p_yx = vec![0usize; k];
        let mut p_yy = vec![0usize; k];
        for yp in 0..k {
            for xs in 0..k {
                let c = joint[(yp * k + yc) * k + xs];
                p_y += c;
                p_yx[xs] += c;
                p_yy[yp] += c;
            }
        }
        for yp in 0..k {
            for xs in 0..k {
                let c = joint[(yp * k + yc) * k + xs];
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                te += c / nf * (c * p_y as f64 / (p_yx[xs] as f64 * p_yy[yp] as f64)).ln();
            }
        }
    }
    te.max(0.0)
}

/// Standard lag-one transfer entropy from `cause` to `effect` (nats).
pub fn transfer_entropy(cause: &[f64], effect: &[f64], bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::InvalidArgument("transfer_entropy needs at least 2 bins".into()));
    }
    check_pair(cause, effect, 5 * bins.pow(3))?;
    Ok(transfer_entropy_symbols(
        &quantile_symbols(cause, bins),
        &quantile_symbols(effect, bins),
        bins,
        1,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VlteConfig {
    pub bins: usize,
    /// DTW lag band for the re-timed cause.
    pub min_lag: usize,
    pub max_lag: usize,
    pub nboot: usize,
    pub alpha: f64,
}

impl Default for VlteConfig {
    fn default() -> Self {
        Self { bins: 2, min_lag: 1, max_lag: 4, nboot: 500, alpha: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityCell {
    pub cause: String,
    pub effect: String,
    pub te_forward: f64,
    pub te_backward: f64,
    /// NaN when the backward entropy is zero.
    pub te_ratio: f64,
    pub p_value: f64,
    /// Set to 1/nboot when no surrogate reached the observed value (the
    /// true p-value is below it).
    pub p_below: Option<f64>,
    pub flag: bool,
    pub nboot: usize,
    pub modal_lag: usize,
}

struct Observed {
    forward: f64,
    backward: f64,
    modal_lag: usize,
}

fn vl_pair(zc: &[f64], ze: &[f64], cause: &[f64], sy: &[usize], cfg: &VlteConfig) -> Observed {
    let a = dtw_z(zc, ze, cfg.min_lag, cfg.max_lag);
    let sx = quantile_symbols(&a.apply(cause), cfg.bins);
    Observed {
        forward: transfer_entropy_symbols(&sx, sy, cfg.bins, 0),
        backward: transfer_entropy_symbols(sy, &sx, cfg.bins, 1),
        modal_lag: a.modal_lag(),
    }
}

fn rotate(x: &[f64], k: usize) -> Vec<f64> {
    x[k..].iter().chain(&x[..k]).copied().collect()
}

/// Variable-lag TE of one ordered pair with a surrogate p-value: the
/// fraction of `nboot` circular shifts of the cause (offset ≥ n/10, each
/// re-aligned by DTW) whose forward TE reaches the observed forward TE.
pub fn vl_transfer_entropy(cause: &MonthlySeries, effect: &MonthlySeries, cfg: &VlteConfig, seed: u64) -> Result<CausalityCell> {
    let mut cell = vl_transfer_entropy_values(cause.values(), effect.values(), cfg, seed)?;
    cell.cause = cause.name.clone();
    cell.effect = effect.name.clone();
    Ok(cell)
}

pub fn vl_transfer_entropy_values(cause: &[f64], effect: &[f64], cfg: &VlteConfig, seed: u64) -> Result<CausalityCell> {
    if cfg.bins < 2 || cfg.nboot == 0 || cfg.min_lag > cfg.max_lag {
        return Err(Error::InvalidArgument("vlte: need bins ≥ 2, nboot ≥ 1, min_lag ≤ max_lag".into()));
    }
    let n = cause.len();
    check_pair(cause, effect, 5 * cfg.bins.pow(3))?;
    stats::ensure_varying(cause, "vl_transfer_entropy")?;
    stats::ensure_varying(effect, "vl_transfer_entropy")?;
    let zc = stats::zscore(cause);
    let ze = stats::zscore(effect);
    let sy = quantile_symbols(effect, cfg.bins);
    let obs = vl_pair(&zc, &ze, cause, &sy, cfg);
    let lo = n / 10;
    let hi = n - n / 10;
    let exceed: usize = (0..cfg.nboot)
        .into_par_iter()
        .map(|b| {
            let mut rng = task_rng(seed, &[b as u64]);
            let k = rng.random_range(lo..=hi) % n;
            let s = vl_pair(&rotate(&zc, k), &ze, &rotate(cause, k), &sy, cfg);
            (s.forward >= obs.forward) as usize
        })
        .sum();
    let p = exceed as f64 / cfg.nboot as f64;
    let ratio = if obs.backward > 0.0 { obs.forward / obs.backward } else { f64::NAN };
    Ok(CausalityCell {
        cause: String::new(),
        effect: String::new(),
        te_forward: obs.forward,
        te_backward: obs.backward,
        te_ratio: ratio,
        p_value: p,
        p_below: (exceed == 0).then(|| 1.0 / cfg.nboot as f64),
        flag: ratio > 1.0 && p <= cfg.alpha,
        nboot: cfg.nboot,
        modal_lag: obs.modal_lag,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityMatrix {
    pub labels: Vec<String>,
    /// Row = cause, column = effect; diagonal is `None`.
    pub cells: Vec<Vec<Option<CausalityCell>>>,
    /// Per-cell failures, if any.
    pub errors: Vec<String>,
}

impl CausalityMatrix {
    pub fn get(&self, cause: &str, effect: &str) -> Option<&CausalityCell> {
        let i = self.labels.iter().position(|l| l == cause)?;
        let j = self.labels.iter().position(|l| l == effect)?;
        self.cells[i][j].as_ref()
    }
}

/// Seed of one ordered pair, independent of matrix layout.
pub fn cell_seed(seed: u64, cause: &str, effect: &str) -> u64 {
    derive(seed, &[tag(cause), tag(effect)])
}

pub fn causality_matrix(frame: &SeriesFrame, cfg: &VlteConfig, seed: u64) -> CausalityMatrix {
    causality_matrix_series(&frame.all_series(), cfg, seed)
}

pub fn causality_matrix_series(series: &[MonthlySeries], cfg: &VlteConfig, seed: u64) -> CausalityMatrix {
    let k = series.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let results: Vec<((usize, usize), Result<CausalityCell>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let s = cell_seed(seed, &series[i].name, &series[j].name);
            ((i, j), vl_transfer_entropy(&series[i], &series[j], cfg, s))
        })
        .collect();
    let mut cells = vec![vec![None; k]; k];
    let mut errors = Vec::new();
    for ((i, j), r) in results {
        match r {
            Ok(c) => cells[i][j] = Some(c),
            Err(e) => errors.push(format!("{} -> {}: {e}", series[i].name, series[j].name)),
        }
    }
    CausalityMatrix {
        labels: series.iter().map(|s| s.name.clone()).collect(),
        cells,
        errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_series_align_at_zero() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let a = dtw_align_band(&x, &x, 0, 50).unwrap();
        assert!(a.lag_at_t.iter().all(|&l| l == 0));
        assert!(a.cost.abs() < 1e-12);
    }

    #[test]
    fn symbols_balanced() {
        let s = quantile_symbols(&[5.0, 1.0, 3.0, 2.0], 2);
        assert_eq!(s, vec![1, 0, 1, 0]);
    }

    #[test]
    fn band_respected() {
        let x: Vec<f64> = (0..60).map(|i| ((i * 7) % 13) as f64).collect();
        let y: Vec<f64> = (0..60).map(|i| ((i * 5) % 11) as f64).collect();
        let a = dtw_align_band(&x, &y, 1, 4).unwrap();
        assert!(a.lag_at_t.iter().skip(1).all(|&l| (1..=4).contains(&l)));
    }
}
