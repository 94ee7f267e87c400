//! Consented health records, descriptive tables, SIR fitting and
//! forecasting, SPRT, local outlier factor and disparity warnings.

mod describe;
mod disparity;
mod lof;
mod records;
mod sensitivity;
mod sir;
mod sprt;

pub use describe::{case_series, regional_comparison, symptom_distribution, CaseSeries, RegionRow, SymptomRow};
pub use disparity::{
    disparity_check, two_proportion_z, DisparityReport, DisparityWarning, GroupField, GroupRate, Metric,
};
pub use lof::lof_scores;
pub use records::{
    Day, HealthRecord, Ingest, RecordFilter, RecordStore, RegionCode, Symptoms, TestResult, SYMPTOM_NAMES,
};
pub use sensitivity::{record_features, sensitivity_rerun, AnalysisResult, SensitivityConfig, SensitivityReport};
pub use sir::{
    daily_new_cases, sir_fit, sir_forecast, sir_step, sir_trajectory, sse, SirFit, SirFitConfig, SirParams, SirState,
    MIN_SERIES_LEN,
};
pub use sprt::{sprt_run, sprt_update, Decision, Observation, SprtConfig, SprtState};

use alloc::string::String;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("malformed region code `{0}`")]
    InvalidRegion(String),
    #[error("malformed date, expected YYYY-MM-DD")]
    InvalidDate,
    #[error("implausible age {0}")]
    InvalidAge(u16),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("case series dates must increase and counts be non-negative")]
    InvalidSeries,
    #[error("series has {0} points, at least 5 needed")]
    SeriesTooShort(usize),
    #[error("SPRT already reached a decision")]
    SprtFinished,
    #[error("need at least two groups, found {0}")]
    TooFewGroups(usize),
}
