//! Raw-polynomial least squares (degrees 1–3), sequential ANOVA, model
//! selection by R² gain and the turning-point summary of the quadratic.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::MonthlySeries;
use crate::error::{Error, Result};
use crate::linalg::{design, Ols};
use crate::stats;

pub const SELECTION_DELTA: f64 = 0.05;
pub const CONDITION_WARN: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    pub degree: usize,
    /// b0..b_degree.
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub sigma: f64,
    pub df_residual: usize,
    pub rss: f64,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub condition_number: f64,
    pub condition_warning: bool,
    /// −b1/(2·b2) for quadratic fits.
    pub turning_point: Option<f64>,
}

impl PolyFit {
    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c.estimate)
    }

    /// Equation in the form `a+bx-cx^2`.
    pub fn equation(&self) -> String {
        let mut s = format!("{:.4}", self.coefficients[0].estimate);
        for (k, c) in self.coefficients.iter().enumerate().skip(1) {
            let sign = if c.estimate < 0.0 { '-' } else { '+' };
            let pow = if k == 1 { "x".to_string() } else { format!("x^{k}") };
            s.push_str(&format!("{sign}{:.6}{pow}", c.estimate.abs()));
        }
        s
    }
}

fn powers(x: &[f64], degree: usize) -> Vec<Vec<f64>> {
    (1..=degree).map(|k| x.iter().map(|v| v.powi(k as i32)).collect()).collect()
}

fn check_inputs(x: &[f64], y: &[f64], degree: usize) -> Result<()> {
    if !(1..=3).contains(&degree) {
        return Err(Error::InvalidArgument(format!("degree {degree} outside 1..=3")));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("fit_poly: unequal lengths".into()));
    }
    if x.len() <= degree + 2 {
        return Err(Error::TooShort { needed: degree + 3, got: x.len() });
    }
    Ok(())
}

pub fn fit_poly(x: &MonthlySeries, y: &MonthlySeries, degree: usize) -> Result<PolyFit> {
    fit_poly_values(x.values(), y.values(), degree)
}

pub fn fit_poly_values(x: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
    check_inputs(x, y, degree)?;
    let cols = powers(x, degree);
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let xm = design(&refs, true);
    let ols = Ols::fit(&xm, y).map_err(|_| Error::Singular("polynomial design is rank deficient"))?;
    let n = y.len();
    let p = degree + 1;
    let df = n - p;
    let sigma2 = ols.rss / df as f64;
    let tss: f64 = {
        let m = stats::mean(y);
        y.iter().map(|v| (v - m).powi(2)).sum()
    };
    let tdist = StudentsT::new(0.0, 1.0, df as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let coefficients = (0..p)
        .map(|j| {
            let se = (sigma2 * ols.xtx_inv[(j, j)]).sqrt();
            let t = ols.beta[j] / se;
            Coefficient {
                estimate: ols.beta[j],
                std_error: se,
                t_value: t,
                p_value: 2.0 * tdist.sf(t.abs()),
            }
        })
        .collect::<Vec<_>>();
    let sv = xm.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition_number = smax / smin;
    let r_squared = 1.0 - ols.rss / tss;
    let turning_point = (degree == 2).then(|| -ols.beta[1] / (2.0 * ols.beta[2]));
    Ok(PolyFit {
        degree,
        coefficients,
        r_squared,
        adj_r_squared: 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df as f64,
        sigma: sigma2.sqrt(),
        df_residual: df,
        rss: ols.rss,
        fitted: ols.fitted,
        residuals: ols.residuals,
        condition_number,
        condition_warning: condition_number > CONDITION_WARN,
        turning_point,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub term: String,
    pub df: usize,
    pub sum_sq: f64,
    pub mean_sq: f64,
    pub f_value: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub rows: Vec<AnovaRow>,
}

impl AnovaTable {
    pub fn row(&self, term: &str) -> Option<&AnovaRow> {
        self.rows.iter().find(|r| r.term == term)
    }
}

const TERMS: [&str; 3] = ["linear", "quadratic", "cubic"];

/// Type-I decomposition of the degree-`max_degree` model: linear, then
/// quadratic, then cubic effects, each tested against that model's residual
/// mean square.
pub fn sequential_anova(x: &MonthlySeries, y: &MonthlySeries, max_degree: usize) -> Result<AnovaTable> {
    sequential_anova_values(x.values(), y.values(), max_degree)
}

pub fn sequential_anova_values(x: &[f64], y: &[f64], max_degree: usize) -> Result<AnovaTable> {
    check_inputs(x, y, max_degree)?;
    let m = stats::mean(y);
    let mut prev = y.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    let mut ss = Vec::new();
    let mut last = None;
    for d in 1..=max_degree {
        let f = fit_poly_values(x, y, d)?;
        ss.push(prev - f.rss);
        prev = f.rss;
        last = Some(f);
    }
    let full = last.ok_or(Error::InvalidArgument("max_degree must be ≥ 1".into()))?;
    let df_res = full.df_residual;
    let ms_res = full.rss / df_res as f64;
    let mut rows: Vec<AnovaRow> = ss
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let f = s / ms_res;
            AnovaRow {
                term: TERMS[k].to_string(),
                df: 1,
                sum_sq: s,
                mean_sq: s,
                f_value: Some(f),
                p_value: Some(stats::f_sf(f, 1.0, df_res as f64)),
            }
        })
        .collect();
    rows.push(AnovaRow {
        term: "residuals".into(),
        df: df_res,
        sum_sq: full.rss,
        mean_sq: ms_res,
        f_value: None,
        p_value: None,
    });
    Ok(AnovaTable { rows })
}

/// Lowest degree whose successor adds no more than `delta` to R².
pub fn select_model_r2(r2: &[f64], delta: f64) -> usize {
    let mut d = 1;
    while d < r2.len() && r2[d] - r2[d - 1] > delta {
        d += 1;
    }
    d
}

pub fn select_model(fits: &[PolyFit]) -> usize {
    let mut sorted: Vec<&PolyFit> = fits.iter().collect();
    sorted.sort_by_key(|f| f.degree);
    let r2: Vec<f64> = sorted.iter().map(|f| f.r_squared).collect();
    sorted
        .get(select_model_r2(&r2, SELECTION_DELTA) - 1)
        .map_or(1, |f| f.degree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concavity {
    Inverted,
    SaturatingNotYetInverted,
    NotInverted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionSummary {
    pub turning_point: f64,
    pub b2: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub verdict: Concavity,
}

pub fn inversion_summary(fit: &PolyFit, x: &[f64]) -> Result<InversionSummary> {
    if fit.degree != 2 {
        return Err(Error::InvalidArgument("inversion_summary needs a quadratic fit".into()));
    }
    let b2 = fit.coefficients[2].estimate;
    let tp = -fit.coefficients[1].estimate / (2.0 * b2);
    let x_min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let verdict = if b2 < 0.0 && (x_min..=x_max).contains(&tp) {
        Concavity::Inverted
    } else if b2 < 0.0 && tp > x_max {
        Concavity::SaturatingNotYetInverted
    } else {
        Concavity::NotInverted
    };
    Ok(InversionSummary { turning_point: tp, b2, x_min, x_max, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub x: String,
    pub y: String,
    pub fits: Vec<PolyFit>,
    /// Sequential tables for the quadratic and the cubic model.
    pub anova_quadratic: AnovaTable,
    pub anova_cubic: AnovaTable,
    pub selected_degree: usize,
    pub inversion: InversionSummary,
}

pub fn regression_report(x: &MonthlySeries, y: &MonthlySeries) -> Result<RegressionReport> {
    let fits = (1..=3).map(|d| fit_poly(x, y, d)).collect::<Result<Vec<_>>>()?;
    let anova_quadratic = sequential_anova(x, y, 2)?;
    let anova_cubic = sequential_anova(x, y, 3)?;
    let selected_degree = select_model(&fits);
    let inversion = inversion_summary(&fits[1], x.values())?;
    Ok(RegressionReport {
        x: x.name.clone(),
        y: y.name.clone(),
        fits,
        anova_quadratic,
        anova_cubic,
        selected_degree,
        inversion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_parabola() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 2.0 * v - 3.0 * v * v).collect();
        let f = fit_poly_values(&x, &y, 2).unwrap();
        let b = f.estimates();
        assert!((b[0] - 1.0).abs() < 1e-9 && (b[1] - 2.0).abs() < 1e-9 && (b[2] + 3.0).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(inversion_summary(&f, &x).unwrap().verdict, Concavity::Inverted);
    }

    #[test]
    fn selection_rule() {
        assert_eq!(select_model_r2(&[0.874008, 0.963791, 0.977929], SELECTION_DELTA), 2);
        assert_eq!(select_model_r2(&[0.90, 0.96, 0.99], SELECTION_DELTA), 2);
        assert_eq!(select_model_r2(&[1.0, 1.0, 1.0], SELECTION_DELTA), 1);
    }

    #[test]
    fn equation_format() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 5.0 + 0.5 * v - 0.25 * v * v).collect();
        let f = fit_poly_values(&x, &y, 2).unwrap();
        assert_eq!(f.equation(), "5.0000+0.500000x-0.250000x^2");
    }

    #[test]
    fn constant_x_is_rank_deficient() {
        assert!(fit_poly_values(&[1.0; 8], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0], 1).is_err());
    }
}
