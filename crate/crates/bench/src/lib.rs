//! Criterion benchmarks for the `ucurve` hot paths live in `benches/`.
//! This library only provides the shared inputs.

use ucurve::dataset::diff;
use ucurve::{embedded_fixture, SeriesName};

/// Levels of one fixture series.
pub fn levels(name: SeriesName) -> Vec<f64> {
    embedded_fixture().values(name)
}

/// First difference of one fixture series.
pub fn differenced(name: SeriesName) -> Vec<f64> {
    diff(&levels(name))
}
