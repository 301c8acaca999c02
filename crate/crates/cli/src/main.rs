use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ucurve_cli::config::{Analysis, Format, Input, RunConfig, OUT_ENV};
use ucurve_cli::golden::{golden_compare, GoldenFile, Status};
use ucurve_cli::report::{self, run, write_bundle, ReportBundle};
use ucurve_cli::CliError;

#[derive(Parser)]
#[command(name = "ucurve", version, about = "Time-series analysis of FDA product registrations and guidelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics (mean, sd, median, range, skew, kurtosis, se).
    Describe(Common),
    /// Normality, stationarity, long-memory and seasonality diagnostics.
    Diagnose(Common),
    /// Six-test linearity battery on the differenced series.
    Nonlinearity(Common),
    /// Spearman correlation matrix.
    Correlate(Common),
    /// Variable-lag transfer-entropy causality matrix.
    Causality(Common),
    /// Morlet wavelet power spectra with white-noise significance.
    Wavelet(Common),
    /// Cross-wavelet power and coherence of the cumulative pair.
    Coherence(Common),
    /// Linear / quadratic / cubic regression of CumMPI on CumMPIGuides.
    Regress(Common),
    /// Full pipeline; writes every table and figure to the output directory.
    Report {
        #[command(flatten)]
        common: Common,
        /// Restrict to these analyses (comma-separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Compare computed values with the golden anchors. Exits 1 on any
    /// failing or absent anchor.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Golden file (defaults to the shipped one).
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Check an existing report.json instead of recomputing.
        #[arg(long)]
        against: Option<PathBuf>,
        /// Restrict to these analyses (comma-separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Use the embedded fixture dataset (default when --input is absent).
    #[arg(long, conflicts_with = "input")]
    embedded: bool,
    /// CSV with columns month, MDReg, MedReg, MDGuides, MedGuides.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for every stochastic step; required by stochastic analyses.
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap replicates for the threshold likelihood-ratio test.
    #[arg(long)]
    nboot: Option<usize>,
    /// Surrogates per transfer-entropy cell.
    #[arg(long)]
    vlte_nboot: Option<usize>,
    /// White-noise surrogates for wavelet significance (0 disables).
    #[arg(long)]
    n_sim: Option<usize>,
    /// Significance level of the linearity battery.
    #[arg(long)]
    battery_alpha: Option<f64>,
    /// Significance level of transfer-entropy flags.
    #[arg(long)]
    vlte_alpha: Option<f64>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Output formats (comma-separated: csv, json, markdown, svg).
    #[arg(long, value_delimiter = ',')]
    format: Vec<String>,
}

impl Common {
    fn config(&self, analyses: Vec<Analysis>, default_formats: &[Format]) -> Result<RunConfig, CliError> {
        let d = RunConfig::default();
        let formats = if self.format.is_empty() {
            default_formats.to_vec()
        } else {
            self.format.iter().map(|f| f.parse()).collect::<Result<Vec<Format>, _>>()?
        };
        let cfg = RunConfig {
            input: self.input.clone().map_or(Input::Embedded, Input::Path),
            seed: self.seed,
            nboot: self.nboot.unwrap_or(d.nboot),
            vlte_nboot: self.vlte_nboot.unwrap_or(d.vlte_nboot),
            n_sim: self.n_sim.unwrap_or(d.n_sim),
            battery_alpha: self.battery_alpha.unwrap_or(d.battery_alpha),
            vlte_alpha: self.vlte_alpha.unwrap_or(d.vlte_alpha),
            out_dir: self.out.clone().unwrap_or(d.out_dir),
            formats,
            analyses,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_only(only: &[String]) -> Result<Vec<Analysis>, CliError> {
    if only.is_empty() {
        return Ok(Analysis::ALL.to_vec());
    }
    only.iter().map(|s| s.parse()).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn single(common: &Common, a: Analysis) -> Result<i32, CliError> {
    let cfg = common.config(vec![a], &[Format::Markdown])?;
    let bundle = run(&cfg)?;
    let mut stdout = std::io::stdout().lock();
    for t in &bundle.tables {
        let text = if cfg.formats.contains(&Format::Json) {
            report::to_json(&serde_json::json!({ "provenance": bundle.provenance, "table": t }))
        } else if cfg.formats.contains(&Format::Csv) {
            t.to_csv(&bundle.provenance)
        } else {
            t.to_markdown(&bundle.provenance)
        };
        let _ = writeln!(stdout, "{text}");
    }
    if common.out.is_some() {
        let paths = write_bundle(&bundle, &cfg.out_dir, &cfg.formats)?;
        eprintln!("wrote {} files to {}", paths.len(), cfg.out_dir.display());
    }
    Ok(report_failures(&bundle))
}

fn report_failures(bundle: &ReportBundle) -> i32 {
    for (a, e) in &bundle.failures {
        eprintln!("analysis '{a}' failed: {e}");
    }
    if bundle.failures.is_empty() {
        0
    } else {
        1
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Describe(c) => single(&c, Analysis::Describe),
        Command::Diagnose(c) => single(&c, Analysis::Diagnose),
        Command::Nonlinearity(c) => single(&c, Analysis::Nonlinearity),
        Command::Correlate(c) => single(&c, Analysis::Correlate),
        Command::Causality(c) => single(&c, Analysis::Causality),
        Command::Wavelet(c) => single(&c, Analysis::Wavelet),
        Command::Coherence(c) => single(&c, Analysis::Coherence),
        Command::Regress(c) => single(&c, Analysis::Regress),
        Command::Report { common, only } => {
            let cfg = common.config(parse_only(&only)?, &Format::ALL)?;
            let bundle = run(&cfg)?;
            let paths = write_bundle(&bundle, &cfg.out_dir, &cfg.formats)?;
            println!("{}", bundle.provenance.line());
            println!("wrote {} files to {}", paths.len(), cfg.out_dir.display());
            Ok(report_failures(&bundle))
        }
        Command::Verify { common, golden, against, only } => {
            let g = match golden {
                Some(p) => GoldenFile::load(&p)?,
                None => GoldenFile::embedded(),
            };
            let metrics: BTreeMap<String, f64> = match against {
                Some(p) => read_metrics(&p)?,
                None => {
                    let cfg = common.config(parse_only(&only)?, &[Format::Json])?;
                    let bundle = run(&cfg)?;
                    report_failures(&bundle);
                    bundle.metrics()
                }
            };
            let diff = golden_compare(&metrics, &g);
            print!("{}", diff.render());
            let bad = diff.count(Status::Fail) + diff.count(Status::Absent);
            Ok(if bad == 0 { 0 } else { 1 })
        }
    }
}

fn read_metrics(p: &PathBuf) -> Result<BTreeMap<String, f64>, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    let m = v
        .get("metrics")
        .and_then(|m| m.as_object())
        .ok_or_else(|| CliError::Input(format!("{}: no 'metrics' object", p.display())))?;
    Ok(m.iter().filter_map(|(k, v)| v.as_f64().map(|x| (k.clone(), x))).collect())
}
