//! Morlet continuous wavelet transform, cross-wavelet power, coherence and
//! white-noise surrogate significance.

use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dataset::{MonthIndex, MonthlySeries};
use crate::error::{ensure_len, Error, Result};
use crate::rng::task_rng;
use crate::stats;

pub const OMEGA0: f64 = 6.0;
pub const DT: f64 = 1.0 / 12.0;
pub const DJ: f64 = 1.0 / 20.0;
pub const UPPER_PERIOD: f64 = 64.0;
pub const DEFAULT_N_SIM: usize = 250;
pub const MIN_N_SIM: usize = 20;
/// Smoothing window for coherence: time steps, and fraction of an octave.
pub const SMOOTH_TIME: usize = 5;
pub const SMOOTH_OCTAVE: f64 = 0.25;

/// Period corresponding to unit scale for the Morlet wavelet (≈ 1.033).
pub fn fourier_factor() -> f64 {
    4.0 * std::f64::consts::PI / (OMEGA0 + (2.0 + OMEGA0 * OMEGA0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletGrid {
    pub dt: f64,
    pub dj: f64,
    pub scales: Vec<f64>,
    /// Periods in years, geometric with ratio 2^dj.
    pub periods: Vec<f64>,
    pub times: Vec<MonthIndex>,
}

impl WaveletGrid {
    /// Default grid for `n` monthly observations: periods 2·dt … 64 years.
    pub fn monthly(n: usize, start: MonthIndex) -> Result<Self> {
        Self::new(n, start, DT, DJ, 2.0 * DT, UPPER_PERIOD)
    }

    pub fn for_series(series: &MonthlySeries) -> Result<Self> {
        let start = series.start().unwrap_or(crate::dataset::FIXTURE_START);
        Self::monthly(series.len(), start)
    }

    pub fn new(n: usize, start: MonthIndex, dt: f64, dj: f64, lower: f64, upper: f64) -> Result<Self> {
        if !(dt > 0.0 && dj > 0.0 && lower > 0.0 && upper > lower) {
            return Err(Error::InvalidArgument("wavelet grid: need 0 < lower < upper, dt, dj > 0".into()));
        }
        let ff = fourier_factor();
        let s0 = lower / ff;
        let j = ((upper / lower).log2() / dj).floor() as usize;
        let scales: Vec<f64> = (0..=j).map(|i| s0 * 2f64.powf(i as f64 * dj)).collect();
        let periods = scales.iter().map(|s| s * ff).collect();
        Ok(Self { dt, dj, scales, periods, times: MonthIndex::range(start, n) })
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn n_periods(&self) -> usize {
        self.periods.len()
    }

    /// Row whose period is closest (in log scale) to `period`.
    pub fn nearest_row(&self, period: f64) -> usize {
        let target = period.ln();
        (0..self.periods.len())
            .min_by(|&a, &b| {
                (self.periods[a].ln() - target)
                    .abs()
                    .total_cmp(&(self.periods[b].ln() - target).abs())
            })
            .unwrap_or(0)
    }

    /// Largest reliable period at each time (e-folding time √2·scale).
    pub fn coi(&self) -> Vec<f64> {
        let n = self.n_times();
        let ff = fourier_factor();
        (0..n)
            .map(|t| ff * self.dt * (t.min(n - 1 - t) as f64 + 1.0) / std::f64::consts::SQRT_2)
            .collect()
    }
}

/// Period × time matrix stored row-major.
pub type Matrix = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpectrum {
    pub grid: WaveletGrid,
    #[serde(skip)]
    pub coefficients: Vec<Vec<Complex64>>,
    pub power: Matrix,
    pub coi: Vec<f64>,
    pub significance: Option<Matrix>,
    /// Variance of the analysed input (used to scale surrogates).
    pub input_variance: f64,
}

impl WaveletSpectrum {
    /// Time-averaged power per period.
    pub fn average_power(&self) -> Vec<f64> {
        self.power.iter().map(|r| stats::mean(r)).collect()
    }

    pub fn inside_coi(&self, row: usize, t: usize) -> bool {
        self.grid.periods[row] <= self.coi[t]
    }
}

/// Reusable transform: FFT plans and daughter wavelets for one grid.
pub struct Transform {
    n: usize,
    npad: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    daughters: Vec<Vec<f64>>,
}

impl Transform {
    pub fn new(grid: &WaveletGrid) -> Self {
        let n = grid.n_times();
        let npad = n.next_power_of_two();
        let mut planner = FftPlanner::new();
        let tau = 2.0 * std::f64::consts::PI;
        let k: Vec<f64> = (0..npad)
            .map(|i| {
                let j = if i <= npad / 2 { i as f64 } else { i as f64 - npad as f64 };
                j * tau / (npad as f64 * grid.dt)
            })
            .collect();
        let norm_base = std::f64::consts::PI.powf(-0.25);
        let daughters = grid
            .scales
            .iter()
            .map(|&s| {
                let c = (tau * s / grid.dt).sqrt() * norm_base;
                k.iter()
                    .map(|&kk| if kk > 0.0 { c * (-(s * kk - OMEGA0).powi(2) / 2.0).exp() } else { 0.0 })
                    .collect()
            })
            .collect();
        Self {
            n,
            npad,
            fwd: planner.plan_fft_forward(npad),
            inv: planner.plan_fft_inverse(npad),
            daughters,
        }
    }

    /// Coefficients (period × time) of the mean-removed, zero-padded input.
    pub fn coefficients(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        let m = stats::mean(x);
        let mut f: Vec<Complex64> = x.iter().map(|v| Complex64::new(v - m, 0.0)).collect();
        f.resize(self.npad, Complex64::new(0.0, 0.0));
        self.fwd.process(&mut f);
        let scale = 1.0 / self.npad as f64;
        self.daughters
            .iter()
            .map(|d| {
                let mut buf: Vec<Complex64> = f.iter().zip(d).map(|(a, b)| a * b).collect();
                self.inv.process(&mut buf);
                buf.truncate(self.n);
                buf.iter_mut().for_each(|c| *c *= scale);
                buf
            })
            .collect()
    }

    fn power(&self, x: &[f64]) -> Matrix {
        self.coefficients(x)
            .iter()
            .map(|r| r.iter().map(|c| c.norm_sqr()).collect())
            .collect()
    }
}

fn check_input(x: &[f64], what: &str) -> Result<()> {
    ensure_len(x.len(), 32)?;
    stats::ensure_varying(x, what)
}

pub fn cwt_morlet(series: &MonthlySeries, grid: &WaveletGrid) -> Result<WaveletSpectrum> {
    cwt_morlet_values(series.values(), grid)
}

pub fn cwt_morlet_values(x: &[f64], grid: &WaveletGrid) -> Result<WaveletSpectrum> {
    check_input(x, "cwt_morlet")?;
    if x.len() != grid.n_times() {
        return Err(Error::InvalidArgument("cwt_morlet: grid length differs from series".into()));
    }
    let coefficients = Transform::new(grid).coefficients(x);
    let power = coefficients
        .iter()
        .map(|r| r.iter().map(|c| c.norm_sqr()).collect())
        .collect();
    Ok(WaveletSpectrum {
        coi: grid.coi(),
        grid: grid.clone(),
        coefficients,
        power,
        significance: None,
        input_variance: stats::variance(x, 1),
    })
}

fn white_noise(n: usize, var: f64, seed: u64, draw: usize, stream: u64) -> Vec<f64> {
    let mut rng = task_rng(seed, &[stream, draw as u64]);
    let dist = Normal::new(0.0, var.sqrt()).expect("finite variance");
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// Counts, per cell, the surrogates whose statistic reaches the observed
/// value, and converts to p = (1 + count) / (1 + n_sim). `sim` returns one
/// matrix per observed matrix.
fn surrogate_p<F>(observed: &[&Matrix], n_sim: usize, sim: F) -> Vec<Matrix>
where
    F: Fn(usize) -> Vec<Matrix> + Sync,
{
    let zero = || -> Vec<Vec<Vec<u32>>> {
        observed.iter().map(|m| m.iter().map(|r| vec![0u32; r.len()]).collect()).collect()
    };
    let counts = (0..n_sim)
        .into_par_iter()
        .fold(zero, |mut acc, b| {
            for ((c, o), s) in acc.iter_mut().zip(observed).zip(sim(b)) {
                for ((cr, or), sr) in c.iter_mut().zip(o.iter()).zip(s) {
                    for ((ci, oi), si) in cr.iter_mut().zip(or).zip(sr) {
                        *ci += (si >= *oi) as u32;
                    }
                }
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            for (ma, mb) in a.iter_mut().zip(b) {
                for (ra, rb) in ma.iter_mut().zip(mb) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
            }
            a
        });
    counts
        .iter()
        .map(|m| {
            m.iter()
                .map(|r| r.iter().map(|&c| (1.0 + c as f64) / (1.0 + n_sim as f64)).collect())
                .collect()
        })
        .collect()
}

fn check_n_sim(n_sim: usize) -> Result<()> {
    if n_sim < MIN_N_SIM {
        return Err(Error::InvalidArgument(format!("n_sim must be at least {MIN_N_SIM}, got {n_sim}")));
    }
    Ok(())
}

/// Attaches per-cell p-values from variance-matched Gaussian white-noise
/// surrogates.
pub fn significance(spectrum: WaveletSpectrum, n_sim: usize, seed: u64) -> Result<WaveletSpectrum> {
    check_n_sim(n_sim)?;
    let tr = Transform::new(&spectrum.grid);
    let n = spectrum.grid.n_times();
    let var = spectrum.input_variance;
    let mut p = surrogate_p(&[&spectrum.power], n_sim, |b| vec![tr.power(&white_noise(n, var, seed, b, 0x5157))]);
    Ok(WaveletSpectrum { significance: p.pop(), ..spectrum })
}

/// Local-trend removal (degree-2 loess, span 0.75, tricube weights) followed
/// by standardization — applied before the transforms of observed series.
pub fn prepare(x: &[f64]) -> Result<Vec<f64>> {
    check_input(x, "prepare")?;
    let trend = loess(x, 0.75);
    let r: Vec<f64> = x.iter().zip(&trend).map(|(a, b)| a - b).collect();
    stats::ensure_varying(&r, "prepare")?;
    Ok(stats::zscore(&r))
}

/// Local quadratic regression on the index 0..n with the `floor(n·span)`
/// nearest neighbours.
pub fn loess(y: &[f64], span: f64) -> Vec<f64> {
    let n = y.len();
    let q = ((n as f64 * span).floor() as usize).clamp(3, n);
    let mut dist = vec![0.0; n];
    (0..n)
        .map(|i| {
            for (j, d) in dist.iter_mut().enumerate() {
                *d = (j as f64 - i as f64).abs();
            }
            let mut sorted = dist.clone();
            let (_, h, _) = sorted.select_nth_unstable_by(q - 1, f64::total_cmp);
            let h = h.max(1e-12);
            let mut s = [[0.0f64; 3]; 3];
            let mut r = [0.0f64; 3];
            for j in 0..n {
                let u = dist[j] / h;
                if u >= 1.0 {
                    continue;
                }
                let w = (1.0 - u * u * u).powi(3);
                let dx = j as f64 - i as f64;
                let basis = [1.0, dx, dx * dx];
                for a in 0..3 {
                    for b in 0..3 {
                        s[a][b] += w * basis[a] * basis[b];
                    }
                    r[a] += w * basis[a] * y[j];
                }
            }
            let m = nalgebra::Matrix3::from_fn(|a, b| s[a][b]);
            let v = nalgebra::Vector3::new(r[0], r[1], r[2]);
            m.lu().solve(&v).map_or(y[i], |b| b[0])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceField {
    pub grid: WaveletGrid,
    #[serde(skip)]
    pub cross_power: Vec<Vec<Complex64>>,
    /// |Wx·conj(Wy)| / scale.
    pub cross_amplitude: Matrix,
    pub coherence: Matrix,
    /// arg of the smoothed cross spectrum; NaN where it vanishes.
    pub phase: Matrix,
    pub coi: Vec<f64>,
    /// p-values of the cross-wavelet power.
    pub significance: Option<Matrix>,
    pub coherence_significance: Option<Matrix>,
    /// Time-averaged cross amplitude per period.
    pub avg_cross_power: Vec<f64>,
}

impl CoherenceField {
    pub fn peak_period(&self) -> f64 {
        let i = (0..self.avg_cross_power.len())
            .max_by(|&a, &b| self.avg_cross_power[a].total_cmp(&self.avg_cross_power[b]))
            .unwrap_or(0);
        self.grid.periods[i]
    }
}

fn triangle(width: usize) -> Vec<f64> {
    let half = (width / 2) as isize;
    (-half..=half).map(|k| (half + 1 - k.abs()) as f64).collect()
}

/// Separable Bartlett smoothing in time and scale, renormalised at edges.
struct Smoother {
    wt: Vec<f64>,
    ws: Vec<f64>,
}

impl Smoother {
    fn new(dj: f64) -> Self {
        let rows = ((SMOOTH_OCTAVE / dj).round() as usize).max(1) | 1;
        Self { wt: triangle(SMOOTH_TIME), ws: triangle(rows) }
    }

    fn pass<T>(data: &[Vec<T>], w: &[f64], along_time: bool) -> Vec<Vec<T>>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T> + Default,
    {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        let half = (w.len() / 2) as isize;
        let mut out = vec![vec![T::default(); cols]; rows];
        for i in 0..rows {
            for t in 0..cols {
                let mut acc = T::default();
                let mut wsum = 0.0;
                for (k, &wk) in w.iter().enumerate() {
                    let off = k as isize - half;
                    let (ii, tt) = if along_time { (i as isize, t as isize + off) } else { (i as isize + off, t as isize) };
                    if ii < 0 || tt < 0 || ii >= rows as isize || tt >= cols as isize {
                        continue;
                    }
                    acc = acc + data[ii as usize][tt as usize] * wk;
                    wsum += wk;
                }
                out[i][t] = acc / wsum;
            }
        }
        out
    }

    fn apply<T>(&self, data: &[Vec<T>]) -> Vec<Vec<T>>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T> + Default,
    {
        Self::pass(&Self::pass(data, &self.wt, true), &self.ws, false)
    }
}

struct CrossParts {
    cross: Vec<Vec<Complex64>>,
    amplitude: Matrix,
    coherence: Matrix,
    phase: Matrix,
}

fn cross_parts(tr: &Transform, grid: &WaveletGrid, sm: &Smoother, x: &[f64], y: &[f64]) -> CrossParts {
    let wx = tr.coefficients(x);
    let wy = tr.coefficients(y);
    let cross: Vec<Vec<Complex64>> = wx
        .iter()
        .zip(&wy)
        .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u * v.conj()).collect())
        .collect();
    let scaled = |m: Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
        m.into_iter()
            .zip(&grid.scales)
            .map(|(r, s)| r.into_iter().map(|c| c / *s).collect())
            .collect()
    };
    let pow_scaled = |w: &[Vec<Complex64>]| -> Matrix {
        w.iter()
            .zip(&grid.scales)
            .map(|(r, s)| r.iter().map(|c| c.norm_sqr() / s).collect())
            .collect()
    };
    let sxy = sm.apply(&scaled(cross.clone()));
    let sxx = sm.apply(&pow_scaled(&wx));
    let syy = sm.apply(&pow_scaled(&wy));
    let mut coherence = vec![vec![0.0; tr.n]; grid.n_periods()];
    let mut phase = vec![vec![f64::NAN; tr.n]; grid.n_periods()];
    for i in 0..grid.n_periods() {
        for t in 0..tr.n {
            let den = sxx[i][t] * syy[i][t];
            if den > 0.0 {
                coherence[i][t] = (sxy[i][t].norm_sqr() / den).clamp(0.0, 1.0);
            }
            if sxy[i][t].norm() > 0.0 {
                phase[i][t] = sxy[i][t].arg();
            }
        }
    }
    let amplitude = cross
        .iter()
        .zip(&grid.scales)
        .map(|(r, s)| r.iter().map(|c| c.norm() / s).collect())
        .collect();
    CrossParts { cross, amplitude, coherence, phase }
}

/// Cross-wavelet power and smoothed coherence of two equal-length series.
/// With `n_sim > 0`, attaches white-noise surrogate p-values.
pub fn coherence(x: &MonthlySeries, y: &MonthlySeries, grid: &WaveletGrid, n_sim: usize, seed: u64) -> Result<CoherenceField> {
    coherence_values(x.values(), y.values(), grid, n_sim, seed)
}

pub fn coherence_values(x: &[f64], y: &[f64], grid: &WaveletGrid, n_sim: usize, seed: u64) -> Result<CoherenceField> {
    if x.len() != y.len() || x.len() != grid.n_times() {
        return Err(Error::InvalidArgument("coherence: series and grid lengths differ".into()));
    }
    check_input(x, "coherence")?;
    check_input(y, "coherence")?;
    let tr = Transform::new(grid);
    let sm = Smoother::new(grid.dj);
    let parts = cross_parts(&tr, grid, &sm, x, y);
    let (significance, coherence_significance) = if n_sim == 0 {
        (None, None)
    } else {
        check_n_sim(n_sim)?;
        let n = x.len();
        let (vx, vy) = (stats::variance(x, 1), stats::variance(y, 1));
        let mut p = surrogate_p(&[&parts.amplitude, &parts.coherence], n_sim, |b| {
            let sx = white_noise(n, vx, seed, b, 0xC0);
            let sy = white_noise(n, vy, seed, b, 0xC1);
            let c = cross_parts(&tr, grid, &sm, &sx, &sy);
            vec![c.amplitude, c.coherence]
        });
        let coh = p.pop();
        let amp = p.pop();
        (amp, coh)
    };
    let avg_cross_power = parts.amplitude.iter().map(|r| stats::mean(r)).collect();
    Ok(CoherenceField {
        grid: grid.clone(),
        cross_power: parts.cross,
        cross_amplitude: parts.amplitude,
        coherence: parts.coherence,
        phase: parts.phase,
        coi: grid.coi(),
        significance,
        coherence_significance,
        avg_cross_power,
    })
}

/// Replaces each cell by its empirical quantile (mid-rank) in [0, 1].
pub fn quartile_render(power: &Matrix) -> Result<Matrix> {
    let flat: Vec<f64> = power.iter().flatten().copied().collect();
    if flat.len() < 2 || stats::is_constant(&flat) {
        return Err(Error::Degenerate("quartile_render: all cells equal".into()));
    }
    let ranks = stats::average_ranks(&flat);
    let denom = (flat.len() - 1) as f64;
    let mut it = ranks.into_iter();
    Ok(power
        .iter()
        .map(|r| r.iter().map(|_| (it.next().unwrap_or(1.0) - 1.0) / denom).collect())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSummary {
    pub series: String,
    pub periods: Vec<f64>,
    pub average_power: Vec<f64>,
    /// Fraction of cells inside the cone of influence with p ≤ 0.05.
    pub significant_fraction: Option<f64>,
}
