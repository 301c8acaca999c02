//! Least squares via column-scaled Householder QR.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Ols {
    pub beta: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// (X'X)^{-1}; multiply by σ² for the coefficient covariance.
    pub xtx_inv: DMatrix<f64>,
}

impl Ols {
    pub fn fit(x: &DMatrix<f64>, y: &[f64]) -> Result<Self> {
        let (n, p) = x.shape();
        if n != y.len() || n < p {
            return Err(Error::InvalidArgument(format!(
                "least squares with {n} rows, {p} columns, {} responses",
                y.len()
            )));
        }
        let scale: Vec<f64> = (0..p)
            .map(|j| {
                let s = x.column(j).norm();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        let mut xs = x.clone();
        for (j, s) in scale.iter().enumerate() {
            xs.column_mut(j).unscale_mut(*s);
        }
        let qr = xs.qr();
        let r = qr.r();
        let dmax = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
        if (0..p).any(|i| r[(i, i)].abs() <= 1e-10 * dmax.max(f64::MIN_POSITIVE)) {
            return Err(Error::Singular("least squares"));
        }
        let yv = DVector::from_column_slice(y);
        let qty = qr.q().transpose() * &yv;
        let bs = r
            .solve_upper_triangular(&qty)
            .ok_or(Error::Singular("least squares"))?;
        let beta: Vec<f64> = bs.iter().zip(&scale).map(|(b, s)| b / s).collect();
        let fitted_v = x * DVector::from_column_slice(&beta);
        let fitted: Vec<f64> = fitted_v.iter().copied().collect();
        let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let rss = residuals.iter().map(|e| e * e).sum();
        let rinv = r
            .solve_upper_triangular(&DMatrix::identity(p, p))
            .ok_or(Error::Singular("least squares"))?;
        let mut xtx_inv = &rinv * rinv.transpose();
        for i in 0..p {
            for j in 0..p {
                xtx_inv[(i, j)] /= scale[i] * scale[j];
            }
        }
        Ok(Self {
            beta,
            fitted,
            residuals,
            rss,
            xtx_inv,
        })
    }
}

/// Builds a design matrix from columns, optionally prefixed with an intercept.
pub fn design(columns: &[&[f64]], intercept: bool) -> DMatrix<f64> {
    let n = columns.first().map_or(0, |c| c.len());
    let p = columns.len() + intercept as usize;
    DMatrix::from_fn(n, p, |i, j| {
        if intercept && j == 0 {
            1.0
        } else {
            columns[j - intercept as usize][i]
        }
    })
}

/// Response `x[m..]` and lag columns `x[t-1], ..., x[t-m]`.
pub fn lag_matrix(x: &[f64], m: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let y = x[m..].to_vec();
    let lags = (1..=m).map(|k| x[m - k..n - k].to_vec()).collect();
    (y, lags)
}

/// Residuals of y on [1, columns].
pub fn residualize(y: &[f64], columns: &[&[f64]]) -> Result<Vec<f64>> {
    Ols::fit(&design(columns, true), y).map(|o| o.residuals)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
