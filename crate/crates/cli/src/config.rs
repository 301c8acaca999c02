//! Run configuration and its provenance fingerprint.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL: &str = "ucurve";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const OUT_ENV: &str = "UCURVE_OUT";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Embedded,
    Path(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Describe,
    Diagnose,
    Nonlinearity,
    Correlate,
    Causality,
    Wavelet,
    Coherence,
    Regress,
}

impl Analysis {
    /// Pipeline order.
    pub const ALL: [Analysis; 8] = [
        Analysis::Describe,
        Analysis::Diagnose,
        Analysis::Nonlinearity,
        Analysis::Correlate,
        Analysis::Causality,
        Analysis::Wavelet,
        Analysis::Coherence,
        Analysis::Regress,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Analysis::Describe => "describe",
            Analysis::Diagnose => "diagnose",
            Analysis::Nonlinearity => "nonlinearity",
            Analysis::Correlate => "correlate",
            Analysis::Causality => "causality",
            Analysis::Wavelet => "wavelet",
            Analysis::Coherence => "coherence",
            Analysis::Regress => "regress",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Analysis::Nonlinearity | Analysis::Causality | Analysis::Wavelet | Analysis::Coherence)
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Analysis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Analysis::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown analysis '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Markdown,
    Svg,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::Csv, Format::Json, Format::Markdown, Format::Svg];
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            "svg" => Ok(Format::Svg),
            _ => Err(CliError::Config(format!("unknown format '{s}' (csv, json, markdown, svg)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Input,
    pub seed: Option<u64>,
    /// Bootstrap replicates for the threshold LR test.
    pub nboot: usize,
    /// Surrogates per transfer-entropy cell.
    pub vlte_nboot: usize,
    /// White-noise surrogates for wavelet significance; 0 disables it.
    pub n_sim: usize,
    pub battery_alpha: f64,
    pub vlte_alpha: f64,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub analyses: Vec<Analysis>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: Input::Embedded,
            seed: None,
            nboot: ucurve::nonlinearity::DEFAULT_NBOOT,
            vlte_nboot: ucurve::VlteConfig::default().nboot,
            n_sim: ucurve::wavelet::DEFAULT_N_SIM,
            battery_alpha: ucurve::nonlinearity::BATTERY_ALPHA,
            vlte_alpha: ucurve::VlteConfig::default().alpha,
            out_dir: PathBuf::from("ucurve-out"),
            formats: Format::ALL.to_vec(),
            analyses: Analysis::ALL.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.analyses.is_empty() {
            return Err(CliError::Config("no analysis selected".into()));
        }
        if self.formats.is_empty() {
            return Err(CliError::Config("no output format selected".into()));
        }
        if self.seed.is_none() {
            if let Some(a) = self.analyses.iter().find(|a| a.is_stochastic()) {
                return Err(CliError::Config(format!("--seed is required for the stochastic analysis '{a}'")));
            }
        }
        for (name, a) in [("battery alpha", self.battery_alpha), ("vlte alpha", self.vlte_alpha)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(CliError::Config(format!("{name} must lie in (0, 1), got {a}")));
            }
        }
        if self.nboot == 0 || self.vlte_nboot == 0 {
            return Err(CliError::Config("bootstrap counts must be positive".into()));
        }
        if self.n_sim != 0 && self.n_sim < ucurve::wavelet::MIN_N_SIM {
            return Err(CliError::Config(format!(
                "--n-sim must be 0 or at least {}",
                ucurve::wavelet::MIN_N_SIM
            )));
        }
        Ok(())
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    pub fn seed_or_zero(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// The result-affecting part of the config, in a fixed order.
    pub fn canonical(&self) -> RunConfig {
        let mut canon = self.clone();
        canon.out_dir = PathBuf::new();
        canon.formats.clear();
        canon.analyses.sort();
        canon.analyses.dedup();
        canon
    }

    /// SHA-256 over the canonical JSON of everything that affects results.
    /// The output directory and formats are excluded: they change where
    /// artifacts land, not what they contain.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.canonical()).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            tool: TOOL.into(),
            version: VERSION.into(),
            config_hash: self.hash(),
            seed: self.seed,
            config: self.canonical(),
        }
    }
}

/// Header attached to every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub config: RunConfig,
}

impl Provenance {
    /// One-line form for CSV/Markdown comments and SVG metadata.
    pub fn line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("{} {} config={} seed={}", self.tool, self.version, self.config_hash, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stochastic_needs_seed() {
        let cfg = RunConfig::default();
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let cfg = RunConfig { analyses: vec![Analysis::Regress], ..RunConfig::default() };
        assert!(cfg.validate().is_ok());
        let cfg = RunConfig { seed: Some(1), ..RunConfig::default() };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn hash_ignores_destination() {
        let a = RunConfig { seed: Some(3), ..RunConfig::default() };
        let b = RunConfig { out_dir: "elsewhere".into(), formats: vec![Format::Json], ..a.clone() };
        let c = RunConfig { seed: Some(4), ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn parse_names() {
        assert_eq!("regress".parse::<Analysis>().unwrap(), Analysis::Regress);
        assert!("plot".parse::<Analysis>().is_err());
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
    }
}
