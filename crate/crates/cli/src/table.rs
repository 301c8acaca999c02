//! Plain tables and their CSV / Markdown renderings.

use serde::{Deserialize, Serialize};

use crate::config::Provenance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, title: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self, prov: &Provenance) -> String {
        let mut out = format!("# {}\n", prov.line());
        out.push_str(&csv_line(&self.header));
        for r in &self.rows {
            out.push_str(&csv_line(r));
        }
        out
    }

    pub fn to_markdown(&self, prov: &Provenance) -> String {
        let mut out = format!("<!-- {} -->\n\n### {}\n\n", prov.line(), self.title);
        out.push_str(&md_line(&self.header));
        out.push_str(&md_line(&self.header.iter().map(|_| "---".to_string()).collect::<Vec<_>>()));
        for r in &self.rows {
            out.push_str(&md_line(r));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut l = cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    l.push('\n');
    l
}

fn md_line(cells: &[String]) -> String {
    let inner = cells.iter().map(|c| c.replace('|', "\\|")).collect::<Vec<_>>().join(" | ");
    format!("| {inner} |\n")
}

/// Fixed-precision number; NaN and infinities print as `NA`.
pub fn num(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{v:.digits$}")
    } else {
        "NA".into()
    }
}

/// Compact p-value: scientific below 1e-4.
pub fn pval(p: f64) -> String {
    if !p.is_finite() {
        "NA".into()
    } else if p != 0.0 && p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format!("{p:.4}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn renders_escape() {
        let mut t = Table::new("t", "T", &["a", "b"]);
        t.push(vec!["x,y".into(), "p|q".into()]);
        let prov = RunConfig::default().provenance();
        let csv = t.to_csv(&prov);
        assert!(csv.starts_with("# ucurve "));
        assert!(csv.contains("\"x,y\",p|q"));
        assert!(t.to_markdown(&prov).contains("p\\|q"));
    }

    #[test]
    fn number_formats() {
        assert_eq!(num(f64::NAN, 2), "NA");
        assert_eq!(num(1.23456, 2), "1.23");
        assert_eq!(pval(1e-7), "1.000e-7");
        assert_eq!(pval(0.5), "0.5000");
    }
}
