//! Golden-anchor comparison.
//!
//! A golden file is JSON of the form
//!
//! ```json
//! { "schema": "ucurve-golden/1",
//!   "anchors": [ { "id": "table2.MDReg.mean", "value": 377.71,
//!                  "tolerance": { "abs": 0.01 },
//!                  "provenance": "published", "location": "table2",
//!                  "known_deviation": null } ] }
//! ```
//!
//! `tolerance` holds exactly one of `abs` or `rel`. An anchor carrying a
//! `known_deviation` note is still compared; a mismatch is reported as
//! `deviation` rather than `fail` and does not change the exit status.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: &str = "ucurve-golden/1";

/// The golden file shipped with the tool.
pub const EMBEDDED: &str = include_str!("../data/golden.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Abs(f64),
    Rel(f64),
}

impl Tolerance {
    pub fn accepts(self, expected: f64, actual: f64) -> bool {
        if !actual.is_finite() {
            return false;
        }
        let err = (actual - expected).abs();
        match self {
            Tolerance::Abs(t) => err <= t + 1e-12 * expected.abs().max(1.0),
            Tolerance::Rel(t) => err <= t * expected.abs(),
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Abs(t) => write!(f, "±{t}"),
            Tolerance::Rel(t) => write!(f, "±{t} rel"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub id: String,
    pub value: f64,
    pub tolerance: Tolerance,
    /// `published` (printed in the source tables/listings) or `derived`.
    pub provenance: String,
    pub location: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_deviation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub schema: String,
    pub anchors: Vec<Anchor>,
}

impl GoldenFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let g: GoldenFile =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("golden file: {e}")))?;
        if g.schema != SCHEMA {
            return Err(CliError::Config(format!("golden file: unsupported schema '{}'", g.schema)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &g.anchors {
            if !seen.insert(a.id.as_str()) {
                return Err(CliError::Config(format!("golden file: duplicate anchor '{}'", a.id)));
            }
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("shipped golden file is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The analysis producing this anchor was not in the bundle.
    Absent,
    /// Mismatch on an anchor with a documented deviation.
    Deviation,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Absent => "absent",
            Status::Deviation => "deviation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorResult {
    pub id: String,
    pub expected: f64,
    pub actual: Option<f64>,
    pub tolerance: Tolerance,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub results: Vec<AnchorResult>,
}

impl DiffReport {
    pub fn count(&self, status: Status) -> usize {
        self.results.iter().filter(|r| r.status == status).count()
    }

    /// True when no anchor failed outright. Absent anchors do not pass
    /// silently: callers decide whether absence is acceptable.
    pub fn ok(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &AnchorResult> {
        self.results.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let actual = r.actual.map_or_else(|| "-".to_string(), |v| format!("{v:.10e}"));
            out.push_str(&format!(
                "{:<9} {:<44} expected {:<14} actual {:<18} tol {}",
                r.status.to_string(),
                r.id,
                r.expected,
                actual,
                r.tolerance
            ));
            if let Some(n) = &r.note {
                out.push_str(&format!("  [{n}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} anchors: {} pass, {} fail, {} deviation, {} absent\n",
            self.results.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Deviation),
            self.count(Status::Absent)
        ));
        out
    }
}

/// Compares computed metrics (anchor id → value) against the golden file.
pub fn golden_compare(metrics: &BTreeMap<String, f64>, golden: &GoldenFile) -> DiffReport {
    let results = golden
        .anchors
        .iter()
        .map(|a| {
            let actual = metrics.get(&a.id).copied();
            let status = match actual {
                None => Status::Absent,
                Some(v) if a.tolerance.accepts(a.value, v) => Status::Pass,
                Some(_) if a.known_deviation.is_some() => Status::Deviation,
                Some(_) => Status::Fail,
            };
            AnchorResult {
                id: a.id.clone(),
                expected: a.value,
                actual,
                tolerance: a.tolerance,
                status,
                note: if status == Status::Deviation { a.known_deviation.clone() } else { None },
            }
        })
        .collect();
    DiffReport { results }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(anchors: Vec<Anchor>) -> GoldenFile {
        GoldenFile { schema: SCHEMA.into(), anchors }
    }

    fn anchor(id: &str, value: f64, tolerance: Tolerance) -> Anchor {
        Anchor {
            id: id.into(),
            value,
            tolerance,
            provenance: "derived".into(),
            location: "test".into(),
            known_deviation: None,
        }
    }

    #[test]
    fn statuses() {
        let mut dev = anchor("d", 1.0, Tolerance::Abs(0.1));
        dev.known_deviation = Some("documented".into());
        let g = golden(vec![
            anchor("a", 1.0, Tolerance::Abs(0.1)),
            anchor("b", 100.0, Tolerance::Rel(0.01)),
            anchor("c", 1.0, Tolerance::Abs(0.1)),
            dev,
        ]);
        let m: BTreeMap<String, f64> =
            [("a".to_string(), 1.05), ("b".to_string(), 102.0), ("d".to_string(), 5.0)].into_iter().collect();
        let r = golden_compare(&m, &g);
        let st: Vec<Status> = r.results.iter().map(|x| x.status).collect();
        assert_eq!(st, vec![Status::Pass, Status::Fail, Status::Absent, Status::Deviation]);
        assert!(!r.ok());
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Tolerance::Abs(1e9).accepts(0.0, f64::NAN));
        assert!(Tolerance::Abs(0.0).accepts(2.0, 2.0));
    }

    #[test]
    fn shipped_file_parses() {
        let g = GoldenFile::embedded();
        assert!(g.anchors.len() > 250);
        assert!(g.anchors.iter().all(|a| a.value.is_finite()));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = r#"{"schema":"ucurve-golden/1","anchors":[
            {"id":"x","value":1,"tolerance":{"abs":0.1},"provenance":"derived","location":"t"},
            {"id":"x","value":1,"tolerance":{"abs":0.1},"provenance":"derived","location":"t"}]}"#;
        assert!(GoldenFile::parse(text).is_err());
    }
}
