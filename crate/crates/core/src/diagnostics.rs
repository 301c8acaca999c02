//! Normality, stationarity, differencing order, decorrelation lag, long
//! memory and seasonality diagnostics.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dataset::{diff, MonthlySeries};
use crate::error::{ensure_len, Error, Result};
use crate::linalg::{design, dot, lag_matrix, Ols};
use crate::optimize::{brent_fmin, default_tol};
use crate::outcome::{PBound, TestOutcome};
use crate::stats;

pub const DEFAULT_ALPHA: f64 = 0.05;

// ---------------------------------------------------------------- normality

pub fn jarque_bera(series: &MonthlySeries) -> Result<TestOutcome> {
    jarque_bera_values(series.values())
}

pub fn jarque_bera_values(x: &[f64]) -> Result<TestOutcome> {
    ensure_len(x.len(), 8)?;
    stats::ensure_varying(x, "jarque_bera")?;
    let n = x.len() as f64;
    let (m2, m3, m4) = stats::central_moments(x);
    let s = m3 / m2.powf(1.5);
    let k = m4 / (m2 * m2) - 3.0;
    let jb = n / 6.0 * (s * s + k * k / 4.0);
    Ok(TestOutcome::asymptotic("jarque_bera", jb, stats::chisq_sf(jb, 2.0), DEFAULT_ALPHA)
        .with_param("df", 2.0)
        .with_param("skewness", s)
        .with_param("excess_kurtosis", k))
}

fn standardized_sorted(x: &[f64], what: &str) -> Result<Vec<f64>> {
    ensure_len(x.len(), 8)?;
    stats::ensure_varying(x, what)?;
    Ok(stats::sorted(&stats::zscore(x)))
}

/// Smallest p-values the Anderson–Darling and Cramér–von Mises
/// approximations can produce; values at these floors are flagged.
pub const AD_P_FLOOR: f64 = 3.7e-24;
pub const CVM_P_FLOOR: f64 = 7.37e-10;

pub fn anderson_darling(series: &MonthlySeries) -> Result<TestOutcome> {
    anderson_darling_values(series.values())
}

pub fn anderson_darling_values(x: &[f64]) -> Result<TestOutcome> {
    let z = standardized_sorted(x, "anderson_darling")?;
    let n = z.len();
    let nf = n as f64;
    let h: f64 = (0..n)
        .map(|i| {
            let lo = stats::norm_cdf(z[i]).ln();
            let hi = stats::norm_cdf(-z[n - 1 - i]).ln();
            (2.0 * i as f64 + 1.0) * (lo + hi)
        })
        .sum();
    let a = -nf - h / nf;
    let aa = (1.0 + 0.75 / nf + 2.25 / (nf * nf)) * a;
    let (p, bound) = if aa < 0.2 {
        (1.0 - (-13.436 + 101.14 * aa - 223.73 * aa * aa).exp(), PBound::Exact)
    } else if aa < 0.34 {
        (1.0 - (-8.318 + 42.796 * aa - 59.938 * aa * aa).exp(), PBound::Exact)
    } else if aa < 0.6 {
        ((0.9177 - 4.279 * aa - 1.38 * aa * aa).exp(), PBound::Exact)
    } else if aa < 10.0 {
        ((1.2937 - 5.709 * aa + 0.0186 * aa * aa).exp(), PBound::Exact)
    } else {
        (AD_P_FLOOR, PBound::Floor)
    };
    Ok(TestOutcome::new("anderson_darling", a, p, DEFAULT_ALPHA)
        .with_bound(bound)
        .with_param("adjusted", aa))
}

pub fn cramer_von_mises(series: &MonthlySeries) -> Result<TestOutcome> {
    cramer_von_mises_values(series.values())
}

pub fn cramer_von_mises_values(x: &[f64]) -> Result<TestOutcome> {
    let z = standardized_sorted(x, "cramer_von_mises")?;
    let nf = z.len() as f64;
    let w = 1.0 / (12.0 * nf)
        + z.iter()
            .enumerate()
            .map(|(i, &zi)| (stats::norm_cdf(zi) - (2.0 * i as f64 + 1.0) / (2.0 * nf)).powi(2))
            .sum::<f64>();
    let ww = (1.0 + 0.5 / nf) * w;
    let (p, bound) = if ww < 0.0275 {
        (1.0 - (-13.953 + 775.5 * ww - 12542.61 * ww * ww).exp(), PBound::Exact)
    } else if ww < 0.051 {
        (1.0 - (-5.903 + 179.546 * ww - 1515.29 * ww * ww).exp(), PBound::Exact)
    } else if ww < 0.092 {
        ((0.886 - 31.62 * ww + 10.897 * ww * ww).exp(), PBound::Exact)
    } else if ww < 1.1 {
        ((1.111 - 34.242 * ww + 12.832 * ww * ww).exp(), PBound::Exact)
    } else {
        (CVM_P_FLOOR, PBound::Floor)
    };
    Ok(TestOutcome::new("cramer_von_mises", w, p, DEFAULT_ALPHA)
        .with_bound(bound)
        .with_param("adjusted", ww))
}

// --------------------------------------------------------------------- KPSS

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpssType {
    /// No drift, no trend.
    None,
    Drift,
    Trend,
}

impl KpssType {
    /// Critical values at 10%, 5%, 2.5%, 1%.
    fn critical_values(self) -> [f64; 4] {
        match self {
            KpssType::None => [1.196, 1.656, 2.135, 2.787],
            KpssType::Drift => [0.347, 0.463, 0.574, 0.739],
            KpssType::Trend => [0.119, 0.146, 0.176, 0.216],
        }
    }

    fn name(self) -> &'static str {
        match self {
            KpssType::None => "kpss_type1",
            KpssType::Drift => "kpss_type2",
            KpssType::Trend => "kpss_type3",
        }
    }
}

const KPSS_LEVELS: [f64; 4] = [0.10, 0.05, 0.025, 0.01];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpssTriple {
    pub lag: usize,
    pub type1: TestOutcome,
    pub type2: TestOutcome,
    pub type3: TestOutcome,
}

/// Bartlett bandwidth floor(3·√n/13).
pub fn kpss_bandwidth(n: usize) -> usize {
    (3.0 * (n as f64).sqrt() / 13.0).floor() as usize
}

fn long_run_variance(e: &[f64], l: usize) -> f64 {
    let n = e.len();
    let mut s = dot(e, e) / n as f64;
    for k in 1..=l.min(n - 1) {
        let w = 1.0 - k as f64 / (l as f64 + 1.0);
        s += 2.0 * w * dot(&e[k..], &e[..n - k]) / n as f64;
    }
    s
}

fn kpss_statistic(e: &[f64], l: usize) -> f64 {
    let n = e.len() as f64;
    let mut cum = 0.0;
    let mut ss = 0.0;
    for v in e {
        cum += v;
        ss += cum * cum;
    }
    ss / (n * n * long_run_variance(e, l))
}

/// Interpolated p-value clamped to [0.01, 0.10], with the bound direction.
fn kpss_p(stat: f64, cv: [f64; 4]) -> (f64, PBound) {
    if stat <= cv[0] {
        return (KPSS_LEVELS[0], PBound::Cap);
    }
    if stat >= cv[3] {
        return (KPSS_LEVELS[3], PBound::Floor);
    }
    let i = (0..3).find(|&i| stat < cv[i + 1]).unwrap_or(2);
    let t = (stat - cv[i]) / (cv[i + 1] - cv[i]);
    (KPSS_LEVELS[i] + t * (KPSS_LEVELS[i + 1] - KPSS_LEVELS[i]), PBound::Exact)
}

fn kpss_outcome(kind: KpssType, stat: f64, l: usize) -> TestOutcome {
    let (p, bound) = kpss_p(stat, kind.critical_values());
    TestOutcome::new(kind.name(), stat, p, DEFAULT_ALPHA)
        .with_bound(bound)
        .with_param("lag", l as f64)
}

pub fn kpss_test(series: &MonthlySeries) -> Result<KpssTriple> {
    kpss_test_values(series.values())
}

/// KPSS statistics on residuals of the one-step autoregression of the series
/// (without deterministic terms, with a constant, with constant and trend).
pub fn kpss_test_values(x: &[f64]) -> Result<KpssTriple> {
    ensure_len(x.len(), 20)?;
    stats::ensure_varying(x, "kpss_test")?;
    let l = kpss_bandwidth(x.len());
    let y = &x[1..];
    let z = &x[..x.len() - 1];
    let t: Vec<f64> = (1..=y.len()).map(|v| v as f64).collect();
    let fit = |cols: &[&[f64]], intercept: bool| Ols::fit(&design(cols, intercept), y).map(|o| o.residuals);
    let e1 = fit(&[z], false)?;
    let e2 = fit(&[z], true)?;
    let e3 = fit(&[z, &t], true)?;
    Ok(KpssTriple {
        lag: l,
        type1: kpss_outcome(KpssType::None, kpss_statistic(&e1, l), l),
        type2: kpss_outcome(KpssType::Drift, kpss_statistic(&e2, l), l),
        type3: kpss_outcome(KpssType::Trend, kpss_statistic(&e3, l), l),
    })
}

/// Classic level-stationarity KPSS (demeaned series).
pub fn kpss_level(x: &[f64]) -> Result<TestOutcome> {
    ensure_len(x.len(), 10)?;
    stats::ensure_varying(x, "kpss_level")?;
    let m = stats::mean(x);
    let e: Vec<f64> = x.iter().map(|v| v - m).collect();
    let l = kpss_bandwidth(x.len());
    Ok(kpss_outcome(KpssType::Drift, kpss_statistic(&e, l), l))
}

// ------------------------------------------------------ Ljung-Box, lags, d

pub fn ljung_box(series: &MonthlySeries, lag: usize) -> Result<TestOutcome> {
    ljung_box_values(series.values(), lag)
}

pub fn ljung_box_values(x: &[f64], lag: usize) -> Result<TestOutcome> {
    let n = x.len();
    if lag == 0 || lag >= n {
        return Err(Error::InvalidArgument(format!("ljung_box: lag {lag} outside 1..{n}")));
    }
    stats::ensure_varying(x, "ljung_box")?;
    let q = ljung_box_path(x, lag)[lag - 1];
    Ok(TestOutcome::asymptotic("ljung_box", q, stats::chisq_sf(q, lag as f64), DEFAULT_ALPHA)
        .with_param("df", lag as f64))
}

/// Cumulative Q statistics for lags 1..=h.
pub(crate) fn ljung_box_path(x: &[f64], h: usize) -> Vec<f64> {
    let n = x.len() as f64;
    let r = stats::acf_raw(x, h);
    let mut q = 0.0;
    (1..=h)
        .map(|k| {
            q += r[k] * r[k] / (n - k as f64);
            n * (n + 2.0) * q
        })
        .collect()
}

/// First lag whose autocorrelation drops below 1/e.
pub fn time_lag(series: &MonthlySeries) -> Result<usize> {
    time_lag_values(series.values())
}

pub fn time_lag_values(x: &[f64]) -> Result<usize> {
    ensure_len(x.len(), 20)?;
    stats::ensure_varying(x, "time_lag")?;
    let h = x.len() / 2;
    let thr = (-1.0f64).exp();
    stats::acf_raw(x, h)
        .iter()
        .position(|&r| r < thr)
        .ok_or_else(|| Error::Degenerate(format!("time_lag: ACF stays above 1/e for {h} lags")))
}

pub const MAX_DIFFS: usize = 2;

/// Differencing order (0..=2) after which the level KPSS test no longer
/// rejects at 5%.
pub fn ndiffs(series: &MonthlySeries) -> Result<usize> {
    ndiffs_values(series.values())
}

pub fn ndiffs_values(x: &[f64]) -> Result<usize> {
    ensure_len(x.len(), 20)?;
    let mut cur = x.to_vec();
    for d in 0..MAX_DIFFS {
        if stats::is_constant(&cur) || !kpss_level(&cur)?.decision {
            return Ok(d);
        }
        cur = diff(&cur);
    }
    Ok(MAX_DIFFS)
}

// -------------------------------------------------------------- long memory

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub alpha: f64,
    pub epsilon: f64,
    pub value: f64,
}

/// Sup-statistic critical values shared by both long-memory tests.
pub const LONG_MEMORY_CRITICAL: [CriticalValue; 8] = [
    CriticalValue { alpha: 0.10, epsilon: 0.02, value: 1.118 },
    CriticalValue { alpha: 0.05, epsilon: 0.02, value: 1.252 },
    CriticalValue { alpha: 0.025, epsilon: 0.02, value: 1.374 },
    CriticalValue { alpha: 0.01, epsilon: 0.02, value: 1.517 },
    CriticalValue { alpha: 0.10, epsilon: 0.05, value: 1.022 },
    CriticalValue { alpha: 0.05, epsilon: 0.05, value: 1.155 },
    CriticalValue { alpha: 0.025, epsilon: 0.05, value: 1.277 },
    CriticalValue { alpha: 0.01, epsilon: 0.05, value: 1.426 },
];

pub fn critical_value(alpha: f64, epsilon: f64) -> Option<f64> {
    LONG_MEMORY_CRITICAL
        .iter()
        .find(|c| (c.alpha - alpha).abs() < 1e-12 && (c.epsilon - epsilon).abs() < 1e-12)
        .map(|c| c.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongMemoryResult {
    pub test_name: String,
    pub d_hat: f64,
    pub w_stat: f64,
    pub m: usize,
    /// Trimming fraction that defines the supremum range.
    pub epsilon: f64,
    pub critical_values: Vec<CriticalValue>,
}

impl LongMemoryResult {
    pub fn critical_value(&self, alpha: f64, epsilon: f64) -> Option<f64> {
        critical_value(alpha, epsilon)
    }

    /// True when long memory is rejected (spurious) at `alpha`, using the
    /// column of this result's trimming fraction.
    pub fn rejects(&self, alpha: f64) -> Option<bool> {
        critical_value(alpha, self.epsilon).map(|c| self.w_stat > c)
    }
}

/// Default bandwidth floor(1 + n^0.75).
pub fn default_bandwidth(n: usize) -> usize {
    (1.0 + (n as f64).powf(0.75)).floor() as usize
}

struct Periodogram {
    lambda: Vec<f64>,
    intensity: Vec<f64>,
}

fn periodogram(x: &[f64], m: usize) -> Periodogram {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let tau = 2.0 * std::f64::consts::PI;
    Periodogram {
        lambda: (1..=m).map(|j| tau * j as f64 / n as f64).collect(),
        intensity: (1..=m).map(|j| buf[j].norm_sqr() / (tau * n as f64)).collect(),
    }
}

fn check_bandwidth(n: usize, m: usize) -> Result<()> {
    if m < 10 {
        return Err(Error::InvalidArgument(format!("long memory: m = {m} is below 10")));
    }
    if m > n / 2 {
        return Err(Error::InvalidArgument(format!("long memory: m = {m} exceeds n/2 = {}", n / 2)));
    }
    Ok(())
}

/// Local Whittle estimate: minimizes log(mean λ^{2d} I) − 2d·Σlog λ / divisor.
fn local_whittle(p: &Periodogram, divisor: f64, lo: f64, hi: f64) -> f64 {
    let sum_log: f64 = p.lambda.iter().map(|l| l.ln()).sum();
    let obj = |d: f64| {
        let g = p
            .lambda
            .iter()
            .zip(&p.intensity)
            .map(|(l, i)| l.powf(2.0 * d) * i)
            .sum::<f64>()
            / p.lambda.len() as f64;
        g.ln() - 2.0 * d * sum_log / divisor
    };
    brent_fmin(obj, lo, hi, default_tol())
}

/// sup over k ≥ k0 (1-based) of |Σ_{j≤k} ν_j (a_j/G − 1)| / √Σν².
fn sup_score(p: &Periodogram, d: f64, g_divisor: f64, k0: usize) -> f64 {
    let a: Vec<f64> = p
        .lambda
        .iter()
        .zip(&p.intensity)
        .map(|(l, i)| l.powf(2.0 * d) * i)
        .collect();
    let g = a.iter().sum::<f64>() / g_divisor;
    let logs: Vec<f64> = p.lambda.iter().map(|l| l.ln()).collect();
    let lm = stats::mean(&logs);
    let nu: Vec<f64> = logs.iter().map(|v| v - lm).collect();
    let norm = dot(&nu, &nu).sqrt();
    let mut cum = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (k, (v, aj)) in nu.iter().zip(&a).enumerate() {
        cum += v * (aj / g - 1.0);
        if k + 1 >= k0 {
            best = best.max(cum.abs() / norm);
        }
    }
    best
}

pub const QU_EPSILON: f64 = 0.05;
pub const MLWS_EPSILON: f64 = 0.02;

/// Qu's test of true versus spurious long memory.
pub fn qu_test(series: &MonthlySeries, m: usize) -> Result<LongMemoryResult> {
    qu_test_values(series.values(), m)
}

pub fn qu_test_values(x: &[f64], m: usize) -> Result<LongMemoryResult> {
    check_bandwidth(x.len(), m)?;
    stats::ensure_varying(x, "qu_test")?;
    let p = periodogram(x, m);
    let mf = m as f64;
    let d = local_whittle(&p, mf - 2.0, -0.5, 2.5);
    let k0 = ((QU_EPSILON * mf).floor() as usize).max(1);
    Ok(LongMemoryResult {
        test_name: "qu".into(),
        d_hat: d,
        w_stat: sup_score(&p, d, mf, k0),
        m,
        epsilon: QU_EPSILON,
        critical_values: LONG_MEMORY_CRITICAL.to_vec(),
    })
}

/// Univariate local Whittle score-type test.
pub fn local_whittle_score(series: &MonthlySeries, m: usize) -> Result<LongMemoryResult> {
    local_whittle_score_values(series.values(), m)
}

pub fn local_whittle_score_values(x: &[f64], m: usize) -> Result<LongMemoryResult> {
    check_bandwidth(x.len(), m)?;
    stats::ensure_varying(x, "local_whittle_score")?;
    let p = periodogram(x, m);
    let mf = m as f64;
    let d = local_whittle(&p, mf - 1.0, -0.5, 1.0);
    let k0 = ((MLWS_EPSILON * mf).ceil() as usize).max(1);
    Ok(LongMemoryResult {
        test_name: "local_whittle_score".into(),
        d_hat: d,
        w_stat: sup_score(&p, d, mf - 1.0, k0),
        m,
        epsilon: MLWS_EPSILON,
        critical_values: LONG_MEMORY_CRITICAL.to_vec(),
    })
}

// -------------------------------------------------------------- seasonality

pub const QS_ALPHA: f64 = 0.01;
pub const KW_ALPHA: f64 = 0.002;
const SEASON: usize = 12;

/// Residuals after first differencing and an OLS AR(2) fit with intercept.
pub fn seasonality_residuals(x: &[f64]) -> Result<Vec<f64>> {
    let dx = diff(x);
    let (y, lags) = lag_matrix(&dx, 2);
    let cols: Vec<&[f64]> = lags.iter().map(Vec::as_slice).collect();
    Ok(Ols::fit(&design(&cols, true), &y)?.residuals)
}

/// Number of leading observations consumed by [`seasonality_residuals`].
pub const SEASONALITY_LOST: usize = 3;

/// QS statistic: Ljung–Box form on the seasonal lags 12 and 24, with a
/// non-positive first seasonal autocorrelation forcing zero and a negative
/// second one truncated to zero.
pub fn qs_test(e: &[f64]) -> Result<TestOutcome> {
    let n = e.len();
    ensure_len(n, 2 * SEASON + 3)?;
    let corr = |k: usize| stats::pearson(&e[k..], &e[..n - k]);
    let r1 = corr(SEASON);
    let r2 = corr(2 * SEASON).max(0.0);
    let nf = n as f64;
    let qs = if r1 <= 0.0 {
        0.0
    } else {
        nf * (nf + 2.0) * (r1 * r1 / (nf - 12.0) + r2 * r2 / (nf - 24.0))
    };
    Ok(TestOutcome::asymptotic("qs", qs, stats::chisq_sf(qs, 2.0), QS_ALPHA).with_param("df", 2.0))
}

/// Kruskal–Wallis rank test across calendar-month groups; `first_month` is
/// the month (1–12) of `e[0]`.
pub fn kruskal_wallis_months(e: &[f64], first_month: u32) -> Result<TestOutcome> {
    let n = e.len();
    ensure_len(n, 2 * SEASON)?;
    let ranks = stats::average_ranks(e);
    let mut sum = [0.0; SEASON];
    let mut cnt = [0usize; SEASON];
    for (i, r) in ranks.iter().enumerate() {
        let g = (first_month as usize - 1 + i) % SEASON;
        sum[g] += r;
        cnt[g] += 1;
    }
    let nf = n as f64;
    let groups = cnt.iter().filter(|&&c| c > 0).count();
    let mut h = 12.0 / (nf * (nf + 1.0))
        * (0..SEASON).filter(|&g| cnt[g] > 0).map(|g| sum[g] * sum[g] / cnt[g] as f64).sum::<f64>()
        - 3.0 * (nf + 1.0);
    // tie correction
    let s = stats::sorted(e);
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && s[j + 1] == s[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    let c = 1.0 - ties / (nf * nf * nf - nf);
    if c > 0.0 {
        h /= c;
    }
    let df = (groups - 1) as f64;
    Ok(TestOutcome::asymptotic("kruskal_wallis", h, stats::chisq_sf(h, df), KW_ALPHA).with_param("df", df))
}

/// Combined seasonality verdict: seasonal iff QS rejects at 1% or the
/// Kruskal–Wallis test rejects at 0.2%. The stored p-value is the smaller of
/// the two, each scaled to the 1% level, so `decision == p ≤ 0.01` holds.
pub fn seasonality_combined(series: &MonthlySeries) -> Result<TestOutcome> {
    let first = series.start().map_or(1, |m| m.month);
    seasonality_combined_values(series.values(), first)
}

pub fn seasonality_combined_values(x: &[f64], first_month: u32) -> Result<TestOutcome> {
    if x.len() < 3 * SEASON {
        return Err(Error::TooShort { needed: 3 * SEASON, got: x.len() });
    }
    stats::ensure_varying(x, "seasonality_combined")?;
    let e = seasonality_residuals(x)?;
    let qs = qs_test(&e)?;
    let e_month = (first_month as usize - 1 + SEASONALITY_LOST) % SEASON + 1;
    let kw = kruskal_wallis_months(&e, e_month as u32)?;
    let p = qs.p_value.min(kw.p_value * QS_ALPHA / KW_ALPHA).min(1.0);
    let bound = if qs.p_bound == PBound::Floor || kw.p_bound == PBound::Floor {
        PBound::Floor
    } else {
        PBound::Exact
    };
    Ok(TestOutcome::new("seasonality_combined", qs.statistic, p, QS_ALPHA)
        .with_bound(bound)
        .with_param("qs", qs.statistic)
        .with_param("qs_p", qs.p_value)
        .with_param("kw", kw.statistic)
        .with_param("kw_p", kw.p_value))
}

// ---------------------------------------------------------------- battery

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub series: String,
    pub jarque_bera: TestOutcome,
    pub anderson_darling: TestOutcome,
    pub cramer_von_mises: TestOutcome,
    pub kpss: KpssTriple,
    pub ndiffs: usize,
    pub time_lag: usize,
    pub ljung_box: TestOutcome,
    pub qu: LongMemoryResult,
    pub local_whittle: LongMemoryResult,
    pub seasonal: TestOutcome,
}

/// Full per-series diagnostics. Long-memory tests run on the first
/// difference with the default bandwidth; Ljung–Box uses `time_lag`.
pub fn diagnose(series: &MonthlySeries) -> Result<DiagnosticsRow> {
    let x = series.values();
    let dx = diff(x);
    let m = default_bandwidth(x.len());
    let lag = time_lag_values(x)?;
    Ok(DiagnosticsRow {
        series: series.name.clone(),
        jarque_bera: jarque_bera_values(x)?,
        anderson_darling: anderson_darling_values(x)?,
        cramer_von_mises: cramer_von_mises_values(x)?,
        kpss: kpss_test_values(x)?,
        ndiffs: ndiffs_values(x)?,
        time_lag: lag,
        ljung_box: ljung_box_values(x, lag)?,
        qu: qu_test_values(&dx, m)?,
        local_whittle: local_whittle_score_values(&dx, m)?,
        seasonal: seasonality_combined(series)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kpss_p_interpolation() {
        let cv = KpssType::Drift.critical_values();
        assert_eq!(kpss_p(0.1, cv), (0.10, PBound::Cap));
        assert_eq!(kpss_p(5.0, cv), (0.01, PBound::Floor));
        let (p, _) = kpss_p(0.463, cv);
        assert!((p - 0.05).abs() < 1e-12);
        let (p, _) = kpss_p((0.463 + 0.574) / 2.0, cv);
        assert!((p - 0.0375).abs() < 1e-12);
    }

    #[test]
    fn critical_table_lookup() {
        assert_eq!(critical_value(0.05, 0.02), Some(1.252));
        assert_eq!(critical_value(0.01, 0.05), Some(1.426));
        assert_eq!(critical_value(0.2, 0.02), None);
    }

    #[test]
    fn ljung_box_monotone() {
        let x: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64).collect();
        let q = ljung_box_path(&x, 20);
        assert!(q.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn bandwidth_rules() {
        assert_eq!(kpss_bandwidth(536), 5);
        assert_eq!(default_bandwidth(536), 112);
    }
}
