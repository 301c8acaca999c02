//! The eight monthly series: loading, validation, derivation and the embedded
//! fixture (May 1976 – December 2020).

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FIXTURE_CSV: &str = include_str!("../data/ucurve.csv");

/// First month of the fixture.
pub const FIXTURE_START: MonthIndex = MonthIndex { year: 1976, month: 5 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthIndex {
    pub year: i32,
    pub month: u32,
}

impl MonthIndex {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidArgument(format!("month {month} out of range")));
        }
        Ok(Self { year, month })
    }

    pub fn succ(self) -> Self {
        self.plus(1)
    }

    pub fn plus(self, months: usize) -> Self {
        let zero = self.year as i64 * 12 + (self.month as i64 - 1) + months as i64;
        Self {
            year: zero.div_euclid(12) as i32,
            month: (zero.rem_euclid(12) + 1) as u32,
        }
    }

    /// Decimal year at the start of the month, e.g. 1976-05 → 1976.333.
    pub fn decimal_year(self) -> f64 {
        self.year as f64 + (self.month as f64 - 1.0) / 12.0
    }

    pub fn range(start: MonthIndex, len: usize) -> Vec<MonthIndex> {
        (0..len).map(|k| start.plus(k)).collect()
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad month `{s}` (want YYYY-MM)"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let year = y.parse().map_err(|_| bad())?;
        let month = m.get(..2).unwrap_or(m).parse().map_err(|_| bad())?;
        MonthIndex::new(year, month)
    }
}

impl Serialize for MonthIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical series identifiers, in appendix column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeriesName {
    MDReg,
    MedReg,
    MDGuides,
    MedGuides,
    MPI,
    MPIGuides,
    CumMPI,
    CumMPIGuides,
}

impl SeriesName {
    pub const ALL: [SeriesName; 8] = [
        SeriesName::MDReg,
        SeriesName::MedReg,
        SeriesName::MDGuides,
        SeriesName::MedGuides,
        SeriesName::MPI,
        SeriesName::MPIGuides,
        SeriesName::CumMPI,
        SeriesName::CumMPIGuides,
    ];

    pub const BASE: [SeriesName; 4] = [
        SeriesName::MDReg,
        SeriesName::MedReg,
        SeriesName::MDGuides,
        SeriesName::MedGuides,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeriesName::MDReg => "MDReg",
            SeriesName::MedReg => "MedReg",
            SeriesName::MDGuides => "MDGuides",
            SeriesName::MedGuides => "MedGuides",
            SeriesName::MPI => "MPI",
            SeriesName::MPIGuides => "MPIGuides",
            SeriesName::CumMPI => "CumMPI",
            SeriesName::CumMPIGuides => "CumMPIGuides",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_cumulative(self) -> bool {
        matches!(self, SeriesName::CumMPI | SeriesName::CumMPIGuides)
    }
}

impl fmt::Display for SeriesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeriesName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown series `{s}`")))
    }
}

/// A named monthly series. Values are `f64` so that differenced series may go
/// negative; loaded counts are always non-negative integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    pub name: String,
    pub index: Vec<MonthIndex>,
    pub values: Vec<f64>,
}

impl MonthlySeries {
    pub fn new(name: impl Into<String>, start: MonthIndex, values: Vec<f64>) -> Self {
        let index = MonthIndex::range(start, values.len());
        Self {
            name: name.into(),
            index,
            values,
        }
    }

    /// Series with a synthetic monthly index starting at the fixture anchor.
    pub fn from_values(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self::new(name, FIXTURE_START, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> Option<MonthIndex> {
        self.index.first().copied()
    }
}

impl AsRef<[f64]> for MonthlySeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// d-th difference; the index drops its first `d` months.
pub fn difference(series: &MonthlySeries, d: usize) -> Result<MonthlySeries> {
    if d == 0 {
        return Err(Error::InvalidArgument("difference order must be >= 1".into()));
    }
    if d >= series.len() {
        return Err(Error::TooShort {
            needed: d + 1,
            got: series.len(),
        });
    }
    let mut v = series.values.clone();
    for _ in 0..d {
        v = diff(&v);
    }
    Ok(MonthlySeries {
        name: series.name.clone(),
        index: series.index[d..].to_vec(),
        values: v,
    })
}

/// First difference of a slice.
pub fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Inverse of a first difference anchored at `first`.
pub fn undiff(first: f64, dx: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(dx.len() + 1);
    let mut acc = first;
    out.push(acc);
    for &d in dx {
        acc += d;
        out.push(acc);
    }
    out
}

/// The validated eight-series frame. Derived columns are always recomputed
/// from the four base columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFrame {
    start: MonthIndex,
    columns: [Vec<i64>; 8],
}

impl SeriesFrame {
    /// Builds a frame from the four base columns.
    pub fn from_base(
        start: MonthIndex,
        md_reg: Vec<i64>,
        med_reg: Vec<i64>,
        md_guides: Vec<i64>,
        med_guides: Vec<i64>,
    ) -> Result<Self> {
        let n = md_reg.len();
        if [med_reg.len(), md_guides.len(), med_guides.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::InvalidArgument("base columns differ in length".into()));
        }
        if n < 3 {
            return Err(Error::TooShort { needed: 3, got: n });
        }
        for (name, col) in SeriesName::BASE
            .iter()
            .zip([&md_reg, &med_reg, &md_guides, &med_guides])
        {
            if let Some(row) = col.iter().position(|&v| v < 0) {
                return Err(Error::MalformedCell {
                    row: row + 1,
                    column: name.to_string(),
                    reason: "negative count".into(),
                });
            }
        }
        let mpi: Vec<i64> = md_reg.iter().zip(&med_reg).map(|(a, b)| a + b).collect();
        let mpi_g: Vec<i64> = md_guides.iter().zip(&med_guides).map(|(a, b)| a + b).collect();
        let cum = cumsum(&mpi);
        let cum_g = cumsum(&mpi_g);
        Ok(Self {
            start,
            columns: [md_reg, med_reg, md_guides, med_guides, mpi, mpi_g, cum, cum_g],
        })
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> MonthIndex {
        self.start
    }

    pub fn months(&self) -> Vec<MonthIndex> {
        MonthIndex::range(self.start, self.len())
    }

    pub fn counts(&self, name: SeriesName) -> &[i64] {
        &self.columns[name.index()]
    }

    pub fn values(&self, name: SeriesName) -> Vec<f64> {
        self.counts(name).iter().map(|&v| v as f64).collect()
    }

    pub fn series(&self, name: SeriesName) -> MonthlySeries {
        MonthlySeries::new(name.as_str(), self.start, self.values(name))
    }

    pub fn all_series(&self) -> Vec<MonthlySeries> {
        SeriesName::ALL.iter().map(|&n| self.series(n)).collect()
    }

    /// One row in appendix column order.
    pub fn row(&self, i: usize) -> [i64; 8] {
        std::array::from_fn(|c| self.columns[c][i])
    }

    /// Checks every frame invariant; true by construction, exposed for tests
    /// and for frames round-tripped through external tools.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.len();
        let c = &self.columns;
        let mut cum = 0;
        let mut cum_g = 0;
        for t in 0..n {
            cum += c[4][t];
            cum_g += c[5][t];
            let checks = [
                (SeriesName::MPI, c[4][t], c[0][t] + c[1][t]),
                (SeriesName::MPIGuides, c[5][t], c[2][t] + c[3][t]),
                (SeriesName::CumMPI, c[6][t], cum),
                (SeriesName::CumMPIGuides, c[7][t], cum_g),
            ];
            for (name, supplied, computed) in checks {
                if supplied != computed {
                    return Err(Error::DerivedMismatch {
                        column: name.to_string(),
                        row: t + 1,
                        supplied,
                        computed,
                    });
                }
            }
        }
        Ok(())
    }

    /// CSV with the canonical header plus a leading `month` column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("month");
        for n in SeriesName::ALL {
            out.push(',');
            out.push_str(n.as_str());
        }
        out.push('\n');
        for (i, m) in self.months().iter().enumerate() {
            out.push_str(&m.to_string());
            for v in self.row(i) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Column-oriented JSON value with ISO month strings.
    pub fn to_json(&self) -> serde_json::Value {
        let mut cols = serde_json::Map::new();
        for n in SeriesName::ALL {
            cols.insert(n.to_string(), serde_json::json!(self.counts(n)));
        }
        serde_json::json!({
            "months": self.months().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "columns": cols,
        })
    }
}

fn cumsum(x: &[i64]) -> Vec<i64> {
    x.iter()
        .scan(0i64, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Outcome of parsing a table: the frame plus non-fatal warnings.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub frame: SeriesFrame,
    pub warnings: Vec<String>,
}

/// Parses a comma-separated table with a header row naming at least the four
/// base series. Derived columns, when present, are cross-checked; an optional
/// `month` column (YYYY-MM) must be contiguous.
pub fn load_frame<R: Read>(source: R) -> Result<SeriesFrame> {
    load_frame_verbose(source).map(|r| r.frame)
}

pub fn load_frame_verbose<R: Read>(source: R) -> Result<LoadReport> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers()?.clone();
    let mut warnings = Vec::new();

    let mut slot: [Option<usize>; 8] = [None; 8];
    let mut month_col = None;
    for (i, h) in headers.iter().enumerate() {
        if h.eq_ignore_ascii_case("month") {
            month_col = Some(i);
        } else if let Ok(n) = h.parse::<SeriesName>() {
            slot[n.index()] = Some(i);
        } else {
            warnings.push(format!("ignoring unknown column `{h}`"));
        }
    }
    for n in SeriesName::BASE {
        if slot[n.index()].is_none() {
            return Err(Error::MissingColumn(n.to_string()));
        }
    }

    let mut cols: [Vec<i64>; 8] = Default::default();
    let mut months = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = r + 1;
        for n in SeriesName::ALL {
            if let Some(i) = slot[n.index()] {
                let cell = rec.get(i).unwrap_or("");
                let v: i64 = cell.parse().map_err(|_| Error::MalformedCell {
                    row,
                    column: n.to_string(),
                    reason: format!("`{cell}` is not an integer"),
                })?;
                if v < 0 {
                    return Err(Error::MalformedCell {
                        row,
                        column: n.to_string(),
                        reason: "negative count".into(),
                    });
                }
                cols[n.index()].push(v);
            }
        }
        if let Some(i) = month_col {
            let cell = rec.get(i).unwrap_or("");
            months.push(cell.parse::<MonthIndex>().map_err(|_| Error::MalformedCell {
                row,
                column: "month".into(),
                reason: format!("`{cell}` is not YYYY-MM"),
            })?);
        }
    }

    let start = match months.first() {
        Some(&m0) => {
            for (k, m) in months.iter().enumerate() {
                if *m != m0.plus(k) {
                    return Err(Error::InvalidArgument(format!(
                        "missing months: row {} is {m}, expected {}",
                        k + 1,
                        m0.plus(k)
                    )));
                }
            }
            m0
        }
        None => FIXTURE_START,
    };

    let [a, b, c, d, ..] = cols.clone();
    let frame = SeriesFrame::from_base(start, a, b, c, d)?;
    for n in [
        SeriesName::MPI,
        SeriesName::MPIGuides,
        SeriesName::CumMPI,
        SeriesName::CumMPIGuides,
    ] {
        if slot[n.index()].is_some() {
            let supplied = &cols[n.index()];
            let computed = frame.counts(n);
            if let Some(row) = (0..supplied.len()).find(|&t| supplied[t] != computed[t]) {
                return Err(Error::DerivedMismatch {
                    column: n.to_string(),
                    row: row + 1,
                    supplied: supplied[row],
                    computed: computed[row],
                });
            }
        }
    }
    Ok(LoadReport { frame, warnings })
}

/// The 536-row appendix dataset.
pub fn embedded_fixture() -> SeriesFrame {
    load_frame(FIXTURE_CSV.as_bytes()).expect("embedded fixture is valid")
}

/// Raw text of the embedded fixture, as transcribed.
pub fn fixture_csv() -> &'static str {
    FIXTURE_CSV
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_arithmetic() {
        let m = FIXTURE_START.plus(535);
        assert_eq!(m, MonthIndex { year: 2020, month: 12 });
        assert_eq!("1976-05".parse::<MonthIndex>().unwrap(), FIXTURE_START);
        assert_eq!(MonthIndex { year: 1999, month: 12 }.succ().to_string(), "2000-01");
    }

    #[test]
    fn hand_sum() {
        let f = load_frame("MDReg,MedReg,MDGuides,MedGuides\n1,3,0,0\n2,4,0,0\n0,0,0,0\n".as_bytes())
            .unwrap();
        assert_eq!(&f.counts(SeriesName::MPI)[..2], &[4, 6]);
        assert_eq!(&f.counts(SeriesName::CumMPI)[..2], &[4, 10]);
    }

    #[test]
    fn zeros() {
        let f = load_frame("MDReg,MedReg,MDGuides,MedGuides\n0,0,0,0\n0,0,0,0\n0,0,0,0\n".as_bytes())
            .unwrap();
        for n in SeriesName::ALL {
            assert!(f.counts(n).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad = "MDReg,MedReg,MDGuides,MedGuides\n1,x,0,0\n1,1,0,0\n1,1,0,0\n";
        assert!(matches!(load_frame(bad.as_bytes()), Err(Error::MalformedCell { .. })));
        let neg = "MDReg,MedReg,MDGuides,MedGuides\n1,-1,0,0\n1,1,0,0\n1,1,0,0\n";
        assert!(matches!(load_frame(neg.as_bytes()), Err(Error::MalformedCell { .. })));
        let mism = "MDReg,MedReg,MDGuides,MedGuides,MPI\n1,1,0,0,3\n1,1,0,0,2\n1,1,0,0,2\n";
        assert!(matches!(load_frame(mism.as_bytes()), Err(Error::DerivedMismatch { .. })));
        let gap = "month,MDReg,MedReg,MDGuides,MedGuides\n2000-01,1,1,0,0\n2000-03,1,1,0,0\n2000-04,1,1,0,0\n";
        assert!(load_frame(gap.as_bytes()).is_err());
        let short = "MDReg,MedReg,MDGuides,MedGuides\n1,1,0,0\n";
        assert!(matches!(load_frame(short.as_bytes()), Err(Error::TooShort { .. })));
        assert!(matches!(
            load_frame("MDReg,MedReg,MDGuides\n1,1,0\n".as_bytes()),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn extra_columns_warn() {
        let r = load_frame_verbose(
            "MDReg,MedReg,MDGuides,MedGuides,Note\n1,1,0,0,7\n1,1,0,0,7\n1,1,0,0,7\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn difference_examples() {
        let s = MonthlySeries::from_values("x", vec![255.0, 442.0, 721.0]);
        let d = difference(&s, 1).unwrap();
        assert_eq!(d.values, vec![187.0, 279.0]);
        assert_eq!(d.index[0], FIXTURE_START.succ());
        let c = MonthlySeries::from_values("c", vec![3.0; 6]);
        assert!(difference(&c, 2).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(difference(&s, 3).is_err());
        assert!(difference(&s, 0).is_err());
    }
}
