//! Linearity battery for (differenced) series: Teraesvirta and White neural
//! network tests, Keenan, Tsay, McLeod–Li and a threshold-AR likelihood ratio.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{diff, MonthlySeries, SeriesFrame};
use crate::diagnostics::ljung_box_path;
use crate::error::{ensure_len, Error, Result};
use crate::linalg::{design, dot, lag_matrix, residualize, Ols};
use crate::outcome::{PBound, TestOutcome};
use crate::rng::task_rng;
use crate::stats;

/// Bonferroni level for six tests at 5%.
pub const BATTERY_ALPHA: f64 = 0.008;
pub const DEFAULT_NBOOT: usize = 1000;

/// Largest AR order considered: min(n − 1, floor(10·log10 n)).
pub fn max_ar_order(n: usize) -> usize {
    ((10.0 * (n as f64).log10()).floor() as usize).min(n - 1)
}

/// Durbin–Levinson recursion on the biased autocovariances; returns the
/// coefficients for every order 0..=k and the innovation variances.
fn durbin_levinson(x: &[f64], k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let r = stats::autocov(x, k);
    let mut phis = vec![Vec::new()];
    let mut vars = vec![r[0]];
    let mut phi: Vec<f64> = Vec::new();
    let mut v = r[0];
    for j in 1..=k {
        let acc: f64 = (0..j - 1).map(|i| phi[i] * r[j - 1 - i]).sum();
        let a = (r[j] - acc) / v;
        let mut next: Vec<f64> = (0..j - 1).map(|i| phi[i] - a * phi[j - 2 - i]).collect();
        next.push(a);
        phi = next;
        v *= 1.0 - a * a;
        phis.push(phi.clone());
        vars.push(v);
    }
    (phis, vars)
}

/// Yule–Walker AR order by AIC = n·log σ²ₖ + 2k.
pub fn ar_order(x: &[f64]) -> Result<usize> {
    ensure_len(x.len(), 10)?;
    stats::ensure_varying(x, "ar_order")?;
    let n = x.len() as f64;
    let (_, vars) = durbin_levinson(x, max_ar_order(x.len()));
    let aic = |k: usize| n * vars[k].ln() + 2.0 * k as f64;
    Ok((0..vars.len()).min_by(|&a, &b| aic(a).total_cmp(&aic(b))).unwrap_or(0))
}

pub fn yule_walker(x: &[f64], order: usize) -> Vec<f64> {
    durbin_levinson(x, order).0.pop().unwrap_or_default()
}

fn check_order(n: usize, m: usize) -> Result<()> {
    if m == 0 || 4 * m >= n {
        return Err(Error::InvalidArgument(format!("AR order {m} unusable for n = {n}")));
    }
    Ok(())
}

fn outcome(name: &str, stat: f64, p: f64) -> TestOutcome {
    TestOutcome::asymptotic(name, stat, p, BATTERY_ALPHA)
}

/// Teraesvirta's LM test at lag 1: the residuals of the linear AR(1) on the
/// standardized series are regressed on the second and third powers of the
/// lag; statistic n·log(SSR₀/SSR₁) against χ²(2).
pub fn teraesvirta_test(x: &[f64]) -> Result<TestOutcome> {
    ensure_len(x.len(), 30)?;
    stats::ensure_varying(x, "teraesvirta_test")?;
    let z = stats::zscore(x);
    let y = &z[1..];
    let l = &z[..z.len() - 1];
    let l2: Vec<f64> = l.iter().map(|v| v * v).collect();
    let l3: Vec<f64> = l.iter().map(|v| v * v * v).collect();
    let u = residualize(y, &[l])?;
    let v = residualize(&u, &[l, &l2, &l3])?;
    let stat = x.len() as f64 * (dot(&u, &u) / dot(&v, &v)).ln();
    Ok(outcome("teraesvirta", stat, stats::chisq_sf(stat, 2.0)).with_param("df", 2.0))
}

const WHITE_HIDDEN: usize = 10;
const WHITE_PCS: usize = 2;

/// White's neural network test at lag 1: ten logistic hidden units with
/// random weights on [1, lag], reduced to their 2nd and 3rd principal
/// components, added to the linear AR(1) regression.
pub fn white_nn_test(x: &[f64], seed: u64) -> Result<TestOutcome> {
    ensure_len(x.len(), 30)?;
    stats::ensure_varying(x, "white_nn_test")?;
    let z = stats::zscore(x);
    let y = &z[1..];
    let l = &z[..z.len() - 1];
    let n = y.len();
    let mut rng = task_rng(seed, &[0x77]);
    let gamma: Vec<[f64; 2]> = (0..WHITE_HIDDEN)
        .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
        .collect();
    let hidden: Vec<Vec<f64>> = gamma
        .iter()
        .map(|g| l.iter().map(|v| 1.0 / (1.0 + (-(g[0] + g[1] * v)).exp())).collect())
        .collect();
    let std_hidden: Vec<Vec<f64>> = hidden
        .iter()
        .map(|h| if stats::is_constant(h) { vec![0.0; n] } else { stats::zscore(h) })
        .collect();
    let zmat = DMatrix::from_fn(n, WHITE_HIDDEN, |i, j| std_hidden[j][i]);
    let cov = zmat.transpose() * &zmat;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..WHITE_HIDDEN).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let pcs: Vec<Vec<f64>> = order[1..=WHITE_PCS]
        .iter()
        .map(|&k| (&zmat * eig.eigenvectors.column(k)).iter().copied().collect())
        .collect();
    let u = residualize(y, &[l])?;
    let v = residualize(&u, &[l, &pcs[0], &pcs[1]])?;
    let stat = x.len() as f64 * (dot(&u, &u) / dot(&v, &v)).ln();
    Ok(outcome("white_nn", stat, stats::chisq_sf(stat, WHITE_PCS as f64))
        .with_param("df", WHITE_PCS as f64)
        .with_param("seed", seed as f64))
}

fn lag_design(x: &[f64], m: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    lag_matrix(x, m)
}

/// Keenan's one-degree test with Yule–Walker AR(m) first stage.
pub fn keenan_test(x: &[f64], m: usize) -> Result<TestOutcome> {
    stats::ensure_varying(x, "keenan_test")?;
    let n = x.len();
    check_order(n, m)?;
    let mu = stats::mean(x);
    let phi = yule_walker(x, m);
    let (y, lags) = lag_design(x, m);
    let fitted: Vec<f64> = (0..y.len())
        .map(|t| mu + (0..m).map(|k| phi[k] * (lags[k][t] - mu)).sum::<f64>())
        .collect();
    let r1: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let sq: Vec<f64> = fitted.iter().map(|v| v * v).collect();
    let cols: Vec<&[f64]> = lags.iter().map(Vec::as_slice).collect();
    let r2 = residualize(&sq, &cols)?;
    let r2r2 = dot(&r2, &r2);
    if r2r2 <= 0.0 {
        return Err(Error::Singular("keenan auxiliary regression"));
    }
    let eta = dot(&r1, &r2).powi(2) / r2r2;
    let df2 = (n - 2 * m - 2) as f64;
    let f = eta * df2 / (dot(&r1, &r1) - eta);
    Ok(outcome("keenan", f, stats::f_sf(f, 1.0, df2))
        .with_param("df1", 1.0)
        .with_param("df2", df2)
        .with_param("order", m as f64))
}

/// Tsay's test: OLS AR(m) residuals regressed on all second-order lag
/// products (each first purged of the linear lags).
pub fn tsay_test(x: &[f64], m: usize) -> Result<TestOutcome> {
    stats::ensure_varying(x, "tsay_test")?;
    let n = x.len();
    check_order(n, m)?;
    let (y, lags) = lag_design(x, m);
    let cols: Vec<&[f64]> = lags.iter().map(Vec::as_slice).collect();
    let r1 = residualize(&y, &cols)?;
    let mut prods = Vec::new();
    for i in 0..m {
        for j in i..m {
            let p: Vec<f64> = lags[i].iter().zip(&lags[j]).map(|(a, b)| a * b).collect();
            prods.push(residualize(&p, &cols)?);
        }
    }
    let k = prods.len();
    let df2 = n as f64 - (2 * m + k + 1) as f64;
    if df2 < 1.0 {
        return Err(Error::TooShort { needed: 2 * m + k + 2, got: n });
    }
    let pcols: Vec<&[f64]> = prods.iter().map(Vec::as_slice).collect();
    let sse = Ols::fit(&design(&pcols, false), &r1)?.rss;
    let f = ((dot(&r1, &r1) - sse) / k as f64) / (sse / df2);
    Ok(outcome("tsay", f, stats::f_sf(f, k as f64, df2))
        .with_param("df1", k as f64)
        .with_param("df2", df2)
        .with_param("order", m as f64))
}

/// McLeod–Li: Ljung–Box on the squared series for lags 1..floor(10·log10 n);
/// the reported p-value is the maximum over that range.
pub fn mcleod_li_test(x: &[f64]) -> Result<TestOutcome> {
    ensure_len(x.len(), 50)?;
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    stats::ensure_varying(&sq, "mcleod_li_test")?;
    let h = max_ar_order(x.len());
    let q = ljung_box_path(&sq, h);
    let (k, p) = q
        .iter()
        .enumerate()
        .map(|(i, &qi)| (i + 1, stats::chisq_sf(qi, (i + 1) as f64)))
        .fold((1, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    Ok(outcome("mcleod_li", q[k - 1], p)
        .with_param("max_lag", h as f64)
        .with_param("argmax_lag", k as f64))
}

// ------------------------------------------------------------------- TLRT

/// Accumulated normal equations of the sorted rows, snapshotted at every
/// candidate split so both regimes' RSS follow by subtraction.
struct SplitRss {
    p: usize,
    snaps: Vec<(usize, Vec<f64>, Vec<f64>, f64)>,
    total: (Vec<f64>, Vec<f64>, f64),
}

fn rss_from_normal(p: usize, xtx: &[f64], xty: &[f64], yty: f64) -> Option<f64> {
    let chol = DMatrix::from_column_slice(p, p, xtx).cholesky()?;
    let b = chol.solve(&DVector::from_column_slice(xty));
    Some((yty - b.iter().zip(xty).map(|(a, c)| a * c).sum::<f64>()).max(0.0))
}

impl SplitRss {
    fn new(rows: &[f64], p: usize, y: &[f64], lo: usize, hi: usize) -> Self {
        let mut xtx = vec![0.0; p * p];
        let mut xty = vec![0.0; p];
        let mut yty = 0.0;
        let mut snaps = Vec::with_capacity(hi + 1 - lo);
        for (t, &yt) in y.iter().enumerate() {
            if (lo..=hi).contains(&t) {
                snaps.push((t, xtx.clone(), xty.clone(), yty));
            }
            let r = &rows[t * p..(t + 1) * p];
            for j in 0..p {
                for i in 0..p {
                    xtx[j * p + i] += r[i] * r[j];
                }
                xty[j] += r[j] * yt;
            }
            yty += yt * yt;
        }
        Self { p, snaps, total: (xtx, xty, yty) }
    }

    fn best(&self, nobs: usize) -> f64 {
        let p = self.p;
        let (txx, txy, tyy) = &self.total;
        self.snaps
            .iter()
            .filter(|(i, ..)| *i > p && nobs - i > p)
            .filter_map(|(_, a, b, c)| {
                let lo = rss_from_normal(p, a, b, *c)?;
                let ra: Vec<f64> = txx.iter().zip(a).map(|(u, v)| u - v).collect();
                let rb: Vec<f64> = txy.iter().zip(b).map(|(u, v)| u - v).collect();
                let hi = rss_from_normal(p, &ra, &rb, tyy - c)?;
                Some(lo + hi)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

const TAR_LOWER: f64 = 0.25;
const TAR_UPPER: f64 = 0.75;

/// LR statistic N·(RSS₀ − RSS₁)/RSS₁ for a two-regime threshold AR(p) with
/// delay 1, the threshold searched over the 25%–75% order statistics.
pub fn tar_lr_statistic(x: &[f64], p: usize) -> Result<f64> {
    check_order(x.len(), p)?;
    let (y, lags) = lag_design(x, p);
    let nobs = y.len();
    let ym = stats::mean(&y);
    let lm: Vec<f64> = lags.iter().map(|c| stats::mean(c)).collect();
    let cols: Vec<&[f64]> = lags.iter().map(Vec::as_slice).collect();
    let rss0 = Ols::fit(&design(&cols, true), &y)?.rss;
    let mut order: Vec<usize> = (0..nobs).collect();
    order.sort_by(|&a, &b| lags[0][a].total_cmp(&lags[0][b]));
    let width = p + 1;
    let mut rows = Vec::with_capacity(nobs * width);
    for &t in &order {
        rows.push(1.0);
        rows.extend((0..p).map(|k| lags[k][t] - lm[k]));
    }
    let ys: Vec<f64> = order.iter().map(|&t| y[t] - ym).collect();
    let nf = nobs as f64;
    let lo = (TAR_LOWER * nf).floor() as usize;
    let hi = (TAR_UPPER * nf).floor() as usize;
    let best = SplitRss::new(&rows, width, &ys, lo, hi).best(nobs);
    if !best.is_finite() || best <= 0.0 {
        return Err(Error::Singular("threshold regression"));
    }
    Ok(nf * (rss0 - best) / best)
}

/// Threshold-AR likelihood-ratio test; p-value from `nboot` series simulated
/// from the fitted Gaussian AR(p) null: (1 + #{LR* ≥ LR}) / (1 + nboot).
pub fn tar_lrt(x: &[f64], p: usize, nboot: usize, seed: u64) -> Result<TestOutcome> {
    stats::ensure_varying(x, "tar_lrt")?;
    if nboot == 0 {
        return Err(Error::InvalidArgument("tar_lrt: nboot must be positive".into()));
    }
    let lr = tar_lr_statistic(x, p)?;
    let (y, lags) = lag_design(x, p);
    let cols: Vec<&[f64]> = lags.iter().map(Vec::as_slice).collect();
    let fit = Ols::fit(&design(&cols, true), &y)?;
    let sigma = (fit.rss / (y.len() - p - 1) as f64).sqrt();
    let n = x.len();
    let start = stats::mean(x);
    let exceed: usize = (0..nboot)
        .into_par_iter()
        .map(|b| {
            let mut rng = task_rng(seed, &[0x7a, b as u64]);
            let sim = simulate_ar(&fit.beta, sigma, start, n, &mut rng);
            match tar_lr_statistic(&sim, p) {
                Ok(s) if s >= lr => 1,
                _ => 0,
            }
        })
        .sum();
    let pv = (1 + exceed) as f64 / (1 + nboot) as f64;
    Ok(TestOutcome::new("tar_lrt", lr, pv, BATTERY_ALPHA)
        .with_bound(PBound::Exact)
        .with_param("order", p as f64)
        .with_param("nboot", nboot as f64))
}

const BURN_IN: usize = 200;

/// Simulates x_t = β₀ + Σ βₖ x_{t−k} + σ·ε_t with Gaussian ε after a burn-in.
pub fn simulate_ar<R: Rng>(beta: &[f64], sigma: f64, start: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let p = beta.len() - 1;
    let mut buf = vec![start; p];
    buf.reserve(n + BURN_IN);
    for _ in 0..n + BURN_IN {
        let t = buf.len();
        let e: f64 = rng.sample(StandardNormal);
        let v = beta[0] + (1..=p).map(|k| beta[k] * buf[t - k]).sum::<f64>() + sigma * e;
        buf.push(v);
    }
    buf.split_off(buf.len() - n)
}

// ---------------------------------------------------------------- battery

pub type Cell = std::result::Result<TestOutcome, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityReport {
    pub series: String,
    /// AR working order selected on the differenced series.
    pub order: Option<usize>,
    pub teraesvirta: Cell,
    pub white_nn: Cell,
    pub keenan: Cell,
    pub mcleod_li: Cell,
    pub tsay: Cell,
    pub tar_lrt: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Linear,
    Nonlinear,
}

impl NonlinearityReport {
    pub fn cells(&self) -> [(&'static str, &Cell); 6] {
        [
            ("teraesvirta", &self.teraesvirta),
            ("white_nn", &self.white_nn),
            ("keenan", &self.keenan),
            ("mcleod_li", &self.mcleod_li),
            ("tsay", &self.tsay),
            ("tar_lrt", &self.tar_lrt),
        ]
    }

    pub fn verdict(cell: &Cell) -> Option<Verdict> {
        cell.as_ref()
            .ok()
            .map(|o| if o.decision { Verdict::Nonlinear } else { Verdict::Linear })
    }
}

/// All six tests on the first difference of one series.
pub fn report_for(series: &MonthlySeries, nboot: usize, seed: u64) -> NonlinearityReport {
    let x = diff(series.values());
    let order = ar_order(&x);
    let with_order = |f: &dyn Fn(usize) -> Result<TestOutcome>| -> Cell {
        match &order {
            Ok(m) => f(*m).map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        }
    };
    NonlinearityReport {
        series: series.name.clone(),
        order: order.as_ref().ok().copied(),
        teraesvirta: teraesvirta_test(&x).map_err(|e| e.to_string()),
        white_nn: white_nn_test(&x, seed).map_err(|e| e.to_string()),
        keenan: with_order(&|m| keenan_test(&x, m)),
        mcleod_li: mcleod_li_test(&x).map_err(|e| e.to_string()),
        tsay: with_order(&|m| tsay_test(&x, m)),
        tar_lrt: with_order(&|m| tar_lrt(&x, m, nboot, seed)),
    }
}

/// Battery over every column of the frame; each series uses a seed derived
/// from its name, so the result does not depend on column order.
pub fn battery(frame: &SeriesFrame, nboot: usize, seed: u64) -> Vec<NonlinearityReport> {
    battery_series(&frame.all_series(), nboot, seed)
}

pub fn battery_series(series: &[MonthlySeries], nboot: usize, seed: u64) -> Vec<NonlinearityReport> {
    series
        .par_iter()
        .map(|s| report_for(s, nboot, crate::rng::derive(seed, &[crate::rng::tag(&s.name)])))
        .collect()
}
