//! Small numeric helpers shared by the analysis modules.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal};

use crate::error::{Error, Result};

/// Smallest p-value reported as a number; anything below is floored and
/// flagged (mirrors the "< 2.2e-16" convention of the reference output).
pub const P_FLOOR: f64 = 2.2e-16;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Variance with `ddof` degrees of freedom removed from the denominator.
pub fn variance(x: &[f64], ddof: usize) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - ddof) as f64
}

pub fn sd(x: &[f64]) -> f64 {
    variance(x, 1).sqrt()
}

pub fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

pub fn median(x: &[f64]) -> f64 {
    quantile_sorted(&sorted(x), 0.5)
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    let n = s.len();
    if n == 1 {
        return s[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

pub fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

pub fn ensure_varying(x: &[f64], what: &str) -> Result<()> {
    if x.is_empty() || is_constant(x) {
        Err(Error::Degenerate(format!("{what}: constant series")))
    } else {
        Ok(())
    }
}

/// Standardize with sample sd (ddof = 1).
pub fn zscore(x: &[f64]) -> Vec<f64> {
    let m = mean(x);
    let s = sd(x);
    x.iter().map(|v| (v - m) / s).collect()
}

/// Mid-ranks (1-based), ties share the average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Biased (divide-by-n) autocovariances for lags 0..=max_lag.
pub fn autocov(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let c: Vec<f64> = x.iter().map(|v| v - m).collect();
    (0..=max_lag)
        .map(|k| c[k..].iter().zip(&c[..n - k]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect()
}

/// Biased autocorrelations for lags 0..=max_lag (lag 0 is exactly 1).
pub fn acf_raw(x: &[f64], max_lag: usize) -> Vec<f64> {
    let g = autocov(x, max_lag);
    let mut r: Vec<f64> = g.iter().map(|v| v / g[0]).collect();
    r[0] = 1.0;
    r
}

pub fn norm_cdf(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

/// Upper tail of χ²(df).
pub fn chisq_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

/// Upper tail of F(d1, d2).
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(d1, d2).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

/// Central moments m2, m3, m4 (population divisor).
pub fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
    }

    #[test]
    fn tails() {
        assert!((chisq_sf(5.991464547, 2.0) - 0.05).abs() < 1e-9);
        assert!((f_sf(4.964602744, 1.0, 10.0) - 0.05).abs() < 1e-8);
    }
}
