use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::describe::{case_series, symptom_distribution, SymptomRow};
use super::lof::lof_scores;
use super::records::{HealthRecord, RecordStore, RegionCode};
use super::sir::{sir_fit, SirFit, SirFitConfig};
use super::AnalyticsError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    pub k: usize,
    pub cutoff: f64,
    pub population: f64,
    #[serde(default)]
    pub region: Option<RegionCode>,
    #[serde(default)]
    pub fit: SirFitConfig,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig { k: 10, cutoff: 1.5, population: 10_000.0, region: None, fit: SirFitConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisResult {
    pub records: usize,
    pub fit: Option<SirFit>,
    pub distribution: Vec<SymptomRow>,
}

/// The same analyses with and without records whose LOF score exceeds the cutoff.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub with_outliers: AnalysisResult,
    pub without_outliers: AnalysisResult,
    /// Indices into the store of the excluded records.
    pub excluded: Vec<usize>,
}

/// Numeric features used for outlier scoring.
pub fn record_features(r: &HealthRecord) -> Vec<f64> {
    alloc::vec![r.age as f64, r.past_infections as f64, r.symptoms.count() as f64, r.travel_history.len() as f64,]
}

fn analyse(store: &RecordStore, cfg: &SensitivityConfig) -> AnalysisResult {
    let series = case_series(store, cfg.region.as_ref());
    AnalysisResult {
        records: store.len(),
        fit: sir_fit(&series, cfg.population, &cfg.fit).ok(),
        distribution: symptom_distribution(store, None),
    }
}

pub fn sensitivity_rerun(store: &RecordStore, cfg: &SensitivityConfig) -> Result<SensitivityReport, AnalyticsError> {
    let features: Vec<Vec<f64>> = store.records().iter().map(record_features).collect();
    let scores = lof_scores(&features, cfg.k)?;
    let excluded: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > cfg.cutoff).collect();
    let mut kept = RecordStore::new();
    for (r, &s) in store.records().iter().zip(&scores) {
        if s <= cfg.cutoff {
            kept.ingest(r.clone())?;
        }
    }
    Ok(SensitivityReport { with_outliers: analyse(store, cfg), without_outliers: analyse(&kept, cfg), excluded })
}
