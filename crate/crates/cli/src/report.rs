//! End-to-end pipeline: load → analyses → tables, figures and metrics.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use ucurve::causality::{causality_matrix, CausalityMatrix, VlteConfig};
use ucurve::dataset::{load_frame, SeriesFrame, SeriesName};
use ucurve::descriptive::{describe, spearman_matrix, CorrelationMatrix, DescriptiveSummary};
use ucurve::diagnostics::{diagnose, DiagnosticsRow, DEFAULT_ALPHA};
use ucurve::nonlinearity::{battery, Cell, NonlinearityReport};
use ucurve::regression::{regression_report, RegressionReport};
use ucurve::rng::{derive, tag};
use ucurve::wavelet::{self, WaveletGrid, WaveletSummary};
use ucurve::{embedded_fixture, Verdict};

use crate::config::{Analysis, Format, Input, Provenance, RunConfig};
use crate::svg;
use crate::table::{num, pval, Table};
use crate::CliError;

/// Regression and coherence both look at the cumulative pair: regulation
/// (guidelines) as the driver, innovation (registrations) as the response.
pub const PAIR_X: SeriesName = SeriesName::CumMPIGuides;
pub const PAIR_Y: SeriesName = SeriesName::CumMPI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSummary {
    pub x: String,
    pub y: String,
    pub periods: Vec<f64>,
    pub avg_cross_power: Vec<f64>,
    pub mean_coherence: Vec<f64>,
    pub peak_period: f64,
    /// Fraction of cross-power cells inside the cone with p ≤ 0.05.
    pub significant_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub describe: Option<Vec<DescriptiveSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnose: Option<Vec<DiagnosticsRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<Vec<NonlinearityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlate: Option<CorrelationMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub causality: Option<CausalityMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelet: Option<Vec<WaveletSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regress: Option<RegressionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub name: String,
    pub svg: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub results: Results,
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub figures: Vec<Figure>,
    /// Analysis name → error message, for analyses that could not run.
    pub failures: BTreeMap<String, String>,
}

impl ReportBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn figure(&self, name: &str) -> Option<&Figure> {
        self.figures.iter().find(|f| f.name == name)
    }

    pub fn metrics(&self) -> BTreeMap<String, f64> {
        metrics(&self.results)
    }
}

pub fn load_input(input: &Input) -> Result<SeriesFrame, CliError> {
    match input {
        Input::Embedded => Ok(embedded_fixture()),
        Input::Path(p) => {
            let f = fs::File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            load_frame(f).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
    }
}

/// One analysis' output, before it is slotted into `Results`.
enum Output {
    Describe(Vec<DescriptiveSummary>),
    Diagnose(Vec<DiagnosticsRow>),
    Nonlinearity(Vec<NonlinearityReport>),
    Correlate(CorrelationMatrix),
    Causality(CausalityMatrix),
    Wavelet(Vec<WaveletSummary>, Vec<Figure>),
    Coherence(CoherenceSummary, Figure),
    Regress(RegressionReport, Figure),
}

fn analysis_seed(cfg: &RunConfig, a: Analysis) -> u64 {
    derive(cfg.seed_or_zero(), &[tag(a.as_str())])
}

/// Runs the configured analyses on a loaded frame. Analyses run in
/// parallel with per-analysis seeds; a failing analysis is recorded in
/// `failures` and the rest are still produced.
pub fn run_frame(cfg: &RunConfig, frame: &SeriesFrame) -> Result<ReportBundle, CliError> {
    cfg.validate()?;
    let prov = cfg.provenance();
    let selected: Vec<Analysis> = Analysis::ALL.into_iter().filter(|a| cfg.wants(*a)).collect();
    let outputs: Vec<(Analysis, Result<Output, String>)> = selected
        .par_iter()
        .map(|&a| (a, run_one(cfg, frame, a, &prov).map_err(|e| e.to_string())))
        .collect();

    let mut results = Results::default();
    let mut figures = Vec::new();
    let mut failures = BTreeMap::new();
    if cfg.formats.contains(&Format::Svg) {
        figures.push(time_series_figure(frame, &prov));
    }
    for (a, out) in outputs {
        match out {
            Err(e) => {
                failures.insert(a.as_str().to_string(), e);
            }
            Ok(Output::Describe(v)) => results.describe = Some(v),
            Ok(Output::Diagnose(v)) => results.diagnose = Some(v),
            Ok(Output::Nonlinearity(v)) => results.nonlinearity = Some(v),
            Ok(Output::Correlate(v)) => results.correlate = Some(v),
            Ok(Output::Causality(v)) => {
                for (k, e) in v.errors.iter().enumerate() {
                    failures.insert(format!("causality[{k}]"), e.clone());
                }
                results.causality = Some(v)
            }
            Ok(Output::Wavelet(v, f)) => {
                results.wavelet = Some(v);
                figures.extend(f);
            }
            Ok(Output::Coherence(v, f)) => {
                results.coherence = Some(v);
                figures.push(f);
            }
            Ok(Output::Regress(v, f)) => {
                results.regress = Some(v);
                figures.push(f);
            }
        }
    }
    if !cfg.formats.contains(&Format::Svg) {
        figures.clear();
    }
    let tables = tables(&results);
    Ok(ReportBundle { provenance: prov, results, tables, figures, failures })
}

pub fn run(cfg: &RunConfig) -> Result<ReportBundle, CliError> {
    cfg.validate()?;
    let frame = load_input(&cfg.input)?;
    run_frame(cfg, &frame)
}

fn run_one(cfg: &RunConfig, frame: &SeriesFrame, a: Analysis, prov: &Provenance) -> ucurve::Result<Output> {
    let seed = analysis_seed(cfg, a);
    let series = frame.all_series();
    Ok(match a {
        Analysis::Describe => Output::Describe(series.iter().map(describe).collect::<ucurve::Result<_>>()?),
        Analysis::Diagnose => Output::Diagnose(series.par_iter().map(diagnose).collect::<ucurve::Result<_>>()?),
        Analysis::Nonlinearity => {
            let mut reports = battery(frame, cfg.nboot, seed);
            if cfg.battery_alpha != ucurve::nonlinearity::BATTERY_ALPHA {
                for r in &mut reports {
                    for o in [
                        &mut r.teraesvirta,
                        &mut r.white_nn,
                        &mut r.keenan,
                        &mut r.mcleod_li,
                        &mut r.tsay,
                        &mut r.tar_lrt,
                    ].into_iter().flatten() {
                        *o = o.clone().at_alpha(cfg.battery_alpha);
                    }
                }
            }
            Output::Nonlinearity(reports)
        }
        Analysis::Correlate => Output::Correlate(spearman_matrix(frame)?),
        Analysis::Causality => {
            let vc = VlteConfig { nboot: cfg.vlte_nboot, alpha: cfg.vlte_alpha, ..VlteConfig::default() };
            Output::Causality(causality_matrix(frame, &vc, seed))
        }
        Analysis::Wavelet => {
            let grid = WaveletGrid::monthly(frame.len(), frame.start())?;
            let done: Vec<(WaveletSummary, Figure)> = series
                .par_iter()
                .map(|s| wavelet_one(s, &grid, cfg.n_sim, derive(seed, &[tag(&s.name)]), prov))
                .collect::<ucurve::Result<_>>()?;
            let (sums, figs) = done.into_iter().unzip();
            Output::Wavelet(sums, figs)
        }
        Analysis::Coherence => {
            let grid = WaveletGrid::monthly(frame.len(), frame.start())?;
            let x = wavelet::prepare(&frame.values(PAIR_X))?;
            let y = wavelet::prepare(&frame.values(PAIR_Y))?;
            let c = wavelet::coherence_values(&x, &y, &grid, cfg.n_sim, seed)?;
            let significant_fraction = c.significance.as_ref().map(|p| coi_fraction(p, &c.grid, &c.coi));
            let sum = CoherenceSummary {
                x: PAIR_X.as_str().into(),
                y: PAIR_Y.as_str().into(),
                periods: grid.periods.clone(),
                avg_cross_power: c.avg_cross_power.clone(),
                mean_coherence: c.coherence.iter().map(|r| ucurve::stats::mean(r)).collect(),
                peak_period: c.peak_period(),
                significant_fraction,
            };
            let q = wavelet::quartile_render(&c.cross_amplitude)?;
            let mask = c.significance.as_ref().map(sig_mask);
            let svg = svg::heatmap(
                &format!("Cross-wavelet power: {} vs {}", PAIR_X.as_str(), PAIR_Y.as_str()),
                &prov.line(),
                &years(&grid),
                &grid.periods,
                &q,
                mask.as_ref(),
                &c.coi,
            );
            Output::Coherence(sum, Figure { name: "coherence".into(), svg })
        }
        Analysis::Regress => {
            let xs = frame.series(PAIR_X);
            let ys = frame.series(PAIR_Y);
            let r = regression_report(&xs, &ys)?;
            let fig = regression_figure(&r, xs.values(), ys.values(), prov);
            Output::Regress(r, fig)
        }
    })
}

fn years(grid: &WaveletGrid) -> Vec<f64> {
    grid.times.iter().map(|m| m.decimal_year()).collect()
}

fn sig_mask(p: &wavelet::Matrix) -> Vec<Vec<bool>> {
    p.iter().map(|r| r.iter().map(|&v| v <= DEFAULT_ALPHA).collect()).collect()
}

fn coi_fraction(p: &wavelet::Matrix, grid: &WaveletGrid, coi: &[f64]) -> f64 {
    let (mut hit, mut tot) = (0usize, 0usize);
    for (i, row) in p.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            if grid.periods[i] <= coi[t] {
                tot += 1;
                hit += (v <= DEFAULT_ALPHA) as usize;
            }
        }
    }
    if tot == 0 {
        f64::NAN
    } else {
        hit as f64 / tot as f64
    }
}

fn wavelet_one(
    s: &ucurve::MonthlySeries,
    grid: &WaveletGrid,
    n_sim: usize,
    seed: u64,
    prov: &Provenance,
) -> ucurve::Result<(WaveletSummary, Figure)> {
    let x = wavelet::prepare(s.values())?;
    let mut sp = wavelet::cwt_morlet_values(&x, grid)?;
    if n_sim > 0 {
        sp = wavelet::significance(sp, n_sim, seed)?;
    }
    let significant_fraction = sp.significance.as_ref().map(|p| coi_fraction(p, grid, &sp.coi));
    let q = wavelet::quartile_render(&sp.power)?;
    let mask = sp.significance.as_ref().map(sig_mask);
    let svg = svg::heatmap(
        &format!("Wavelet power: {}", s.name),
        &prov.line(),
        &years(grid),
        &grid.periods,
        &q,
        mask.as_ref(),
        &sp.coi,
    );
    let sum = WaveletSummary {
        series: s.name.clone(),
        periods: grid.periods.clone(),
        average_power: sp.average_power(),
        significant_fraction,
    };
    Ok((sum, Figure { name: format!("wavelet_{}", s.name), svg }))
}

fn time_series_figure(frame: &SeriesFrame, prov: &Provenance) -> Figure {
    let times: Vec<f64> = frame.months().iter().map(|m| m.decimal_year()).collect();
    let panels: Vec<(String, Vec<f64>)> = SeriesName::ALL
        .iter()
        .map(|&n| (n.as_str().to_string(), frame.values(n)))
        .collect();
    Figure { name: "timeseries".into(), svg: svg::line_panels("Monthly series", &prov.line(), &times, &panels) }
}

fn regression_figure(r: &RegressionReport, x: &[f64], y: &[f64], prov: &Provenance) -> Figure {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let grid: Vec<f64> = (0..=200).map(|k| lo + (hi - lo) * k as f64 / 200.0).collect();
    let curves = r
        .fits
        .iter()
        .map(|f| {
            let label = format!("degree {}: y = {} (R² {:.6})", f.degree, f.equation(), f.r_squared);
            (label, grid.iter().map(|&g| (g, f.predict(g))).collect())
        })
        .collect::<Vec<_>>();
    Figure {
        name: "regression".into(),
        svg: svg::scatter_fit(&format!("{} on {}", r.y, r.x), &prov.line(), x, y, &curves),
    }
}

// ---------------------------------------------------------------- metrics

fn cell_stat(c: &Cell) -> Option<f64> {
    c.as_ref().ok().map(|o| o.statistic)
}

/// Flat anchor-id → value view of the results, matching golden-file ids.
pub fn metrics(r: &Results) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    let mut put = |k: String, v: f64| {
        m.insert(k, v);
    };
    if let Some(d) = &r.describe {
        for (name, s) in SeriesName::ALL.iter().zip(d) {
            let n = name.as_str();
            for (k, v) in [
                ("mean", s.mean),
                ("sd", s.sd),
                ("median", s.median),
                ("min", s.min),
                ("max", s.max),
                ("range", s.range),
                ("skew", s.skew.unwrap_or(f64::NAN)),
                ("kurtosis", s.kurtosis.unwrap_or(f64::NAN)),
                ("se", s.se),
            ] {
                put(format!("table2.{n}.{k}"), v);
            }
        }
    }
    if let Some(rows) = &r.diagnose {
        for d in rows {
            let n = &d.series;
            put(format!("jarque_bera.{n}.statistic"), d.jarque_bera.statistic);
            put(format!("jarque_bera.{n}.p_value"), d.jarque_bera.p_value);
            put(format!("anderson_darling.{n}.p_value"), d.anderson_darling.p_value);
            put(format!("cramer_von_mises.{n}.p_value"), d.cramer_von_mises.p_value);
            for (t, o) in [("type1", &d.kpss.type1), ("type2", &d.kpss.type2), ("type3", &d.kpss.type3)] {
                put(format!("kpss.{n}.{t}"), o.statistic);
                put(format!("kpss.{n}.{t}_p"), o.p_value);
            }
            put(format!("ljung_box.{n}.statistic"), d.ljung_box.statistic);
            put(format!("ndiffs.{n}"), d.ndiffs as f64);
            put(format!("time_lag.{n}"), d.time_lag as f64);
            put(format!("qu.{n}.w"), d.qu.w_stat);
            put(format!("mlws.{n}.d"), d.local_whittle.d_hat);
            put(format!("mlws.{n}.w"), d.local_whittle.w_stat);
            put(format!("seasonality.{n}"), d.seasonal.decision as u8 as f64);
        }
    }
    if let Some(c) = &r.correlate {
        for i in 0..c.labels.len() {
            for j in i + 1..c.labels.len() {
                put(format!("spearman.{}.{}", c.labels[i], c.labels[j]), c.rho[i][j]);
            }
        }
    }
    if let Some(rows) = &r.nonlinearity {
        for rep in rows {
            let n = &rep.series;
            for (t, c) in rep.cells() {
                let key = if t == "mcleod_li" { "max_p" } else { "statistic" };
                let v = if t == "mcleod_li" { c.as_ref().ok().map(|o| o.p_value) } else { cell_stat(c) };
                if let Some(v) = v {
                    put(format!("{t}.{n}.{key}"), v);
                }
                if let Some(v) = NonlinearityReport::verdict(c) {
                    put(format!("verdict.{n}.{t}"), (v == Verdict::Nonlinear) as u8 as f64);
                }
            }
        }
    }
    if let Some(c) = &r.causality {
        for row in &c.cells {
            for cell in row.iter().flatten() {
                put(format!("vlte.{}.{}.flag", cell.cause, cell.effect), cell.flag as u8 as f64);
            }
        }
    }
    if let Some(c) = &r.coherence {
        put("coherence.peak_period".into(), c.peak_period);
    }
    if let Some(reg) = &r.regress {
        for f in &reg.fits {
            let name = ["linear", "quadratic", "cubic"][f.degree - 1];
            for (k, c) in f.coefficients.iter().enumerate() {
                put(format!("regression.{name}.b{k}"), c.estimate);
                put(format!("regression.{name}.b{k}_se"), c.std_error);
            }
            put(format!("regression.{name}.r2"), f.r_squared);
        }
        if let Some(f) = reg.anova_quadratic.row("quadratic").and_then(|r| r.f_value) {
            put("regression.anova.quadratic_f".into(), f);
        }
        if let Some(f) = reg.anova_cubic.row("cubic").and_then(|r| r.f_value) {
            put("regression.anova.cubic_f".into(), f);
        }
        put("regression.selected_degree".into(), reg.selected_degree as f64);
        put("regression.turning_point".into(), reg.inversion.turning_point);
    }
    m
}

// ---------------------------------------------------------------- tables

fn verdict_cell(c: &Cell) -> String {
    match c {
        Ok(o) => format!("{} (p={})", if o.decision { "Nonlinear" } else { "Linear" }, pval(o.p_value)),
        Err(e) => format!("error: {e}"),
    }
}

pub fn tables(r: &Results) -> Vec<Table> {
    let mut out = Vec::new();
    if let Some(d) = &r.describe {
        let mut t = Table::new(
            "table2",
            "Descriptive statistics",
            &["variable", "n", "mean", "sd", "median", "min", "max", "range", "skew", "kurtosis", "se"],
        );
        for (name, s) in SeriesName::ALL.iter().zip(d) {
            t.push(vec![
                name.as_str().into(),
                s.n.to_string(),
                num(s.mean, 2),
                num(s.sd, 2),
                num(s.median, 1),
                num(s.min, 0),
                num(s.max, 0),
                num(s.range, 0),
                s.skew.map_or("NA".into(), |v| num(v, 2)),
                s.kurtosis.map_or("NA".into(), |v| num(v, 2)),
                num(s.se, 2),
            ]);
        }
        out.push(t);
    }
    if let Some(rows) = &r.diagnose {
        let mut t = Table::new(
            "table3",
            "Dynamic qualities",
            &[
                "variable",
                "jb",
                "jb_p",
                "ad_p",
                "cvm_p",
                "normality",
                "kpss_type1",
                "kpss_type2",
                "kpss_type3",
                "ndiffs",
                "qu_w",
                "mlws_d",
                "mlws_w",
                "long_memory",
                "time_lag",
                "ljung_box",
                "seasonality",
            ],
        );
        for d in rows {
            let normal = [&d.jarque_bera, &d.anderson_darling, &d.cramer_von_mises].iter().all(|o| !o.decision);
            let long_memory = d.qu.rejects(DEFAULT_ALPHA).unwrap_or(false) || d.local_whittle.rejects(DEFAULT_ALPHA).unwrap_or(false);
            t.push(vec![
                d.series.clone(),
                num(d.jarque_bera.statistic, 5),
                pval(d.jarque_bera.p_value),
                pval(d.anderson_darling.p_value),
                pval(d.cramer_von_mises.p_value),
                if normal { "Accept" } else { "Reject" }.into(),
                num(d.kpss.type1.statistic, 3),
                num(d.kpss.type2.statistic, 3),
                num(d.kpss.type3.statistic, 3),
                d.ndiffs.to_string(),
                num(d.qu.w_stat, 6),
                num(d.local_whittle.d_hat, 7),
                num(d.local_whittle.w_stat, 6),
                if long_memory { "TRUE" } else { "FALSE" }.into(),
                d.time_lag.to_string(),
                num(d.ljung_box.statistic, 2),
                if d.seasonal.decision { "TRUE" } else { "FALSE" }.into(),
            ]);
        }
        out.push(t);
    }
    if let Some(rows) = &r.nonlinearity {
        let mut t = Table::new(
            "table4",
            "Linearity of the differenced series",
            &["variable", "ar_order", "teraesvirta", "white_nn", "keenan", "mcleod_li", "tsay", "tar_lrt"],
        );
        for rep in rows {
            let mut row = vec![rep.series.clone(), rep.order.map_or("NA".into(), |m| m.to_string())];
            row.extend(rep.cells().iter().map(|(_, c)| verdict_cell(c)));
            t.push(row);
        }
        out.push(t);
    }
    if let Some(c) = &r.correlate {
        let mut header = vec!["variable"];
        header.extend(c.labels.iter().map(|s| s.as_str()));
        let mut t = Table::new("table5", "Spearman correlation", &header);
        for (i, l) in c.labels.iter().enumerate() {
            let mut row = vec![l.clone()];
            row.extend(c.rho[i].iter().map(|v| num(*v, 4)));
            t.push(row);
        }
        out.push(t);
    }
    if let Some(c) = &r.causality {
        let mut header = vec!["cause \\ effect"];
        header.extend(c.labels.iter().map(|s| s.as_str()));
        let mut t = Table::new("table6", "Variable-lag transfer-entropy causality", &header);
        for (i, l) in c.labels.iter().enumerate() {
            let mut row = vec![l.clone()];
            for cell in &c.cells[i] {
                row.push(match cell {
                    None => String::new(),
                    Some(x) => {
                        let p = match x.p_below {
                            Some(b) => format!("<{}", num(b, 3)),
                            None => num(x.p_value, 3),
                        };
                        format!("{} TER: {} p: {}", if x.flag { "TRUE" } else { "FALSE" }, num(x.te_ratio, 4), p)
                    }
                });
            }
            t.push(row);
        }
        out.push(t);
    }
    if let Some(w) = &r.wavelet {
        let mut t = Table::new("wavelet", "Wavelet power summary", &["variable", "peak_period_years", "significant_fraction"]);
        for s in w {
            let i = (0..s.average_power.len())
                .max_by(|&a, &b| s.average_power[a].total_cmp(&s.average_power[b]))
                .unwrap_or(0);
            t.push(vec![
                s.series.clone(),
                num(s.periods[i], 3),
                s.significant_fraction.map_or("NA".into(), |v| num(v, 4)),
            ]);
        }
        out.push(t);
    }
    if let Some(c) = &r.coherence {
        let mut t = Table::new("coherence", "Cross-wavelet power by period", &["period_years", "avg_cross_power", "mean_coherence"]);
        for ((p, a), m) in c.periods.iter().zip(&c.avg_cross_power).zip(&c.mean_coherence) {
            t.push(vec![num(*p, 4), num(*a, 6), num(*m, 6)]);
        }
        out.push(t);
    }
    if let Some(reg) = &r.regress {
        let mut t = Table::new(
            "regression",
            &format!("Polynomial regression of {} on {}", reg.y, reg.x),
            &["model", "term", "estimate", "std_error", "t_value", "p_value", "r_squared", "adj_r_squared"],
        );
        for f in &reg.fits {
            let model = ["linear", "quadratic", "cubic"][f.degree - 1];
            for (k, c) in f.coefficients.iter().enumerate() {
                t.push(vec![
                    model.into(),
                    format!("b{k}"),
                    format!("{:.6e}", c.estimate),
                    format!("{:.6e}", c.std_error),
                    num(c.t_value, 3),
                    pval(c.p_value),
                    num(f.r_squared, 6),
                    num(f.adj_r_squared, 6),
                ]);
            }
        }
        out.push(t);
        let mut a = Table::new("anova", "Sequential ANOVA", &["model", "term", "df", "sum_sq", "mean_sq", "f_value", "p_value"]);
        for (model, tab) in [("quadratic", &reg.anova_quadratic), ("cubic", &reg.anova_cubic)] {
            for row in &tab.rows {
                a.push(vec![
                    model.into(),
                    row.term.clone(),
                    row.df.to_string(),
                    format!("{:.6e}", row.sum_sq),
                    format!("{:.6e}", row.mean_sq),
                    row.f_value.map_or(String::new(), |v| num(v, 4)),
                    row.p_value.map_or(String::new(), pval),
                ]);
            }
        }
        out.push(a);
    }
    out
}

// ---------------------------------------------------------------- writing

/// Detail payload attached to a table's JSON artifact.
fn detail(r: &Results, table: &str) -> serde_json::Value {
    let v = match table {
        "table2" => serde_json::to_value(&r.describe),
        "table3" => serde_json::to_value(&r.diagnose),
        "table4" => serde_json::to_value(&r.nonlinearity),
        "table5" => serde_json::to_value(&r.correlate),
        "table6" => serde_json::to_value(&r.causality),
        "wavelet" => serde_json::to_value(&r.wavelet),
        "coherence" => serde_json::to_value(&r.coherence),
        "regression" | "anova" => serde_json::to_value(&r.regress),
        _ => Ok(serde_json::Value::Null),
    };
    v.unwrap_or(serde_json::Value::Null)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes every artifact of the bundle; returns the written paths.
pub fn write_bundle(bundle: &ReportBundle, out_dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::Output(format!("{}: {e}", out_dir.display())))?;
    let prov = &bundle.provenance;
    let mut written = Vec::new();
    for t in &bundle.tables {
        for f in formats {
            let (ext, text) = match f {
                Format::Csv => ("csv", t.to_csv(prov)),
                Format::Markdown => ("md", t.to_markdown(prov)),
                Format::Json => {
                    let v = json!({ "provenance": prov, "table": t, "detail": detail(&bundle.results, &t.name) });
                    ("json", to_json(&v))
                }
                Format::Svg => continue,
            };
            let p = out_dir.join(format!("{}.{ext}", t.name));
            write(&p, &text)?;
            written.push(p);
        }
    }
    if formats.contains(&Format::Json) {
        let p = out_dir.join("report.json");
        let v = json!({
            "provenance": prov,
            "results": bundle.results,
            "metrics": bundle.metrics(),
            "failures": bundle.failures,
        });
        write(&p, &to_json(&v))?;
        written.push(p);
    }
    if formats.contains(&Format::Svg) && !bundle.figures.is_empty() {
        let dir = out_dir.join("figures");
        fs::create_dir_all(&dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        for f in &bundle.figures {
            let p = dir.join(format!("{}.svg", f.name));
            write(&p, &f.svg)?;
            written.push(p);
        }
    }
    Ok(written)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}
