//! Command-line front end for the `ucurve` toolkit: run configuration,
//! the end-to-end report pipeline, golden-anchor verification, and
//! CSV / JSON / Markdown / SVG artifact writers.

pub mod config;
pub mod golden;
pub mod report;
pub mod svg;
pub mod table;

pub use config::{Analysis, Format, Input, Provenance, RunConfig};
pub use golden::{golden_compare, DiffReport, GoldenFile, Status};
pub use report::{run, run_frame, write_bundle, ReportBundle};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration values.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read input: {0}")]
    Input(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("analysis failed: {0}")]
    Analysis(String),
}

impl CliError {
    /// 2 for usage/config problems (including an unreadable input path),
    /// 1 for failures while running or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Output(_) | CliError::Analysis(_) => 1,
        }
    }
}
