//! Statistical toolkit for studying the interdependence of monthly FDA
//! medical-product registrations and FDA-issued guidelines.
//!
//! The crate covers the full analysis chain: the embedded monthly dataset,
//! descriptive statistics and rank correlation, stationarity / memory /
//! seasonality diagnostics, a linearity test battery, variable-lag transfer
//! entropy causality, Morlet wavelet spectra and coherence, and polynomial
//! regression of innovation on cumulative regulation.

pub mod dataset;
pub mod causality;
pub mod descriptive;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod nonlinearity;
pub mod optimize;
pub mod outcome;
pub mod regression;
pub mod rng;
pub mod stats;
pub mod wavelet;

pub use dataset::{
    difference, embedded_fixture, load_frame, load_frame_verbose, LoadReport, MonthIndex, MonthlySeries,
    SeriesFrame, SeriesName,
};
pub use descriptive::{acf, describe, minmax_normalize, spearman_matrix, CorrelationMatrix, DescriptiveSummary};
pub use diagnostics::{KpssTriple, LongMemoryResult};
pub use error::{Error, Result};
pub use nonlinearity::{NonlinearityReport, Verdict};
pub use outcome::{PBound, TestOutcome};
pub use regression::{AnovaTable, InversionSummary, PolyFit};
pub use causality::{CausalityCell, CausalityMatrix, VlteConfig};
pub use wavelet::{CoherenceField, WaveletGrid, WaveletSpectrum, WaveletSummary};
