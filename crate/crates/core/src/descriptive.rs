//! Summary statistics, rank correlation, autocorrelation and min-max scaling.

use serde::{Deserialize, Serialize};

use crate::dataset::{MonthlySeries, SeriesFrame};
use crate::error::{ensure_len, Error, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub trimmed_mean: f64,
    pub mad: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    /// `None` when the series has zero variance.
    pub skew: Option<f64>,
    /// Excess kurtosis; `None` when the series has zero variance.
    pub kurtosis: Option<f64>,
    pub se: f64,
}

const TRIM: f64 = 0.1;
const MAD_SCALE: f64 = 1.4826;

pub fn describe(series: &MonthlySeries) -> Result<DescriptiveSummary> {
    describe_values(series.values())
}

pub fn describe_values(x: &[f64]) -> Result<DescriptiveSummary> {
    ensure_len(x.len(), 4)?;
    let n = x.len();
    let nf = n as f64;
    let s = stats::sorted(x);
    let mean = stats::mean(x);
    let sd = stats::sd(x);
    let median = stats::quantile_sorted(&s, 0.5);
    let cut = (nf * TRIM).floor() as usize;
    let trimmed_mean = stats::mean(&s[cut..n - cut]);
    let dev: Vec<f64> = x.iter().map(|v| (v - median).abs()).collect();
    let mad = MAD_SCALE * stats::median(&dev);
    let (m2, m3, m4) = stats::central_moments(x);
    let (skew, kurtosis) = if m2 > 0.0 {
        let g1 = m3 / m2.powf(1.5);
        let b2 = m4 / (m2 * m2);
        let shrink = (nf - 1.0) / nf;
        (Some(g1 * shrink.powf(1.5)), Some(b2 * shrink * shrink - 3.0))
    } else {
        (None, None)
    };
    Ok(DescriptiveSummary {
        n,
        mean,
        sd,
        median,
        trimmed_mean,
        mad,
        min: s[0],
        max: s[n - 1],
        range: s[n - 1] - s[0],
        skew,
        kurtosis,
        se: sd / nf.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// Row-major; `NaN` where a column is constant.
    pub rho: Vec<Vec<f64>>,
    /// Index pairs whose coefficient is undefined.
    pub undefined: Vec<(usize, usize)>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.rho[i][j])
    }
}

/// Spearman correlation of one pair: Pearson correlation of mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("spearman: unequal lengths".into()));
    }
    ensure_len(x.len(), 3)?;
    stats::ensure_varying(x, "spearman")?;
    stats::ensure_varying(y, "spearman")?;
    Ok(stats::pearson(&stats::average_ranks(x), &stats::average_ranks(y)))
}

pub fn spearman_matrix(frame: &SeriesFrame) -> Result<CorrelationMatrix> {
    spearman_columns(&frame.all_series())
}

pub fn spearman_columns(cols: &[MonthlySeries]) -> Result<CorrelationMatrix> {
    let k = cols.len();
    if let Some(c) = cols.first() {
        ensure_len(c.len(), 3)?;
    }
    let ranks: Vec<Option<Vec<f64>>> = cols
        .iter()
        .map(|c| (!stats::is_constant(c.values())).then(|| stats::average_ranks(c.values())))
        .collect();
    let mut rho = vec![vec![f64::NAN; k]; k];
    let mut undefined = Vec::new();
    for i in 0..k {
        for j in 0..k {
            match (&ranks[i], &ranks[j]) {
                (Some(a), Some(b)) if i == j => {
                    let _ = (a, b);
                    rho[i][j] = 1.0;
                }
                (Some(a), Some(b)) => rho[i][j] = stats::pearson(a, b).clamp(-1.0, 1.0),
                _ => undefined.push((i, j)),
            }
        }
    }
    Ok(CorrelationMatrix {
        labels: cols.iter().map(|c| c.name.clone()).collect(),
        rho,
        undefined,
    })
}

/// Biased autocorrelations for lags 0..=max_lag.
pub fn acf(series: &MonthlySeries, max_lag: usize) -> Result<Vec<f64>> {
    acf_values(series.values(), max_lag)
}

pub fn acf_values(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= x.len() {
        return Err(Error::InvalidArgument(format!(
            "acf: max_lag {max_lag} must be below length {}",
            x.len()
        )));
    }
    stats::ensure_varying(x, "acf")?;
    Ok(stats::acf_raw(x, max_lag))
}

/// Maps values onto [0, 1] via (x − min)/(max − min).
pub fn minmax_normalize(series: &MonthlySeries) -> Result<MonthlySeries> {
    let x = series.values();
    stats::ensure_varying(x, "minmax_normalize")?;
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MonthlySeries {
        name: series.name.clone(),
        index: series.index.clone(),
        values: x.iter().map(|v| (v - lo) / (hi - lo)).collect(),
    })
}
