use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use super::records::{Day, RecordFilter, RecordStore, RegionCode, TestResult, SYMPTOM_NAMES};
use super::AnalyticsError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymptomRow {
    pub symptom: &'static str,
    pub count: u64,
    pub proportion: f64,
}

/// Per-symptom counts and proportions among the records passing `filter`.
/// Empty when no record passes.
pub fn symptom_distribution(store: &RecordStore, filter: Option<&RecordFilter>) -> Vec<SymptomRow> {
    let mut counts = [0u64; 12];
    let mut total = 0u64;
    for r in store.records() {
        if filter.is_some_and(|f| !f.matches(r)) {
            continue;
        }
        total += 1;
        for (c, on) in counts.iter_mut().zip(r.symptoms.flags()) {
            *c += on as u64;
        }
    }
    if total == 0 {
        return Vec::new();
    }
    SYMPTOM_NAMES
        .iter()
        .zip(counts)
        .map(|(&symptom, count)| SymptomRow { symptom, count, proportion: count as f64 / total as f64 })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionRow {
    pub region: RegionCode,
    pub cases: u64,
    pub records: u64,
    pub per_capita: Option<f64>,
}

/// Positive cases per region, most cases first, ties by region code.
pub fn regional_comparison(store: &RecordStore, population: Option<&BTreeMap<RegionCode, u64>>) -> Vec<RegionRow> {
    let mut by_region: BTreeMap<&RegionCode, (u64, u64)> = BTreeMap::new();
    for r in store.records() {
        let e = by_region.entry(&r.geolocation).or_default();
        e.0 += (r.test_result == TestResult::Positive) as u64;
        e.1 += 1;
    }
    let mut rows: Vec<RegionRow> = by_region
        .into_iter()
        .map(|(region, (cases, records))| RegionRow {
            region: region.clone(),
            cases,
            records,
            per_capita: population.and_then(|p| p.get(region)).filter(|&&n| n > 0).map(|&n| cases as f64 / n as f64),
        })
        .collect();
    rows.sort_by(|a, b| b.cases.cmp(&a.cases).then_with(|| a.region.cmp(&b.region)));
    rows
}

/// Daily new-case counts for one region, or all regions when `region` is None.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseSeries {
    pub region: Option<RegionCode>,
    pub counts: Vec<(Day, f64)>,
}

impl CaseSeries {
    /// Dates must strictly increase and counts be finite and non-negative.
    pub fn new(region: Option<RegionCode>, counts: Vec<(Day, f64)>) -> Result<Self, AnalyticsError> {
        let increasing = counts.windows(2).all(|w| w[0].0 < w[1].0);
        let valid = counts.iter().all(|(_, c)| c.is_finite() && *c >= 0.0);
        if !increasing || !valid {
            return Err(AnalyticsError::InvalidSeries);
        }
        Ok(CaseSeries { region, counts })
    }

    pub fn values(&self) -> Vec<f64> {
        self.counts.iter().map(|&(_, c)| c).collect()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Positive results per day, gap days filled with zero.
pub fn case_series(store: &RecordStore, region: Option<&RegionCode>) -> CaseSeries {
    let mut daily: BTreeMap<Day, f64> = BTreeMap::new();
    for r in store.records() {
        if region.is_some_and(|g| &r.geolocation != g) {
            continue;
        }
        let e = daily.entry(r.observed_at).or_default();
        if r.test_result == TestResult::Positive {
            *e += 1.0;
        }
    }
    let mut counts = Vec::new();
    if let (Some((&first, _)), Some((&last, _))) = (daily.first_key_value(), daily.last_key_value()) {
        let mut d = first;
        loop {
            counts.push((d, daily.get(&d).copied().unwrap_or(0.0)));
            if d == last {
                break;
            }
            d = d.next();
        }
    }
    CaseSeries { region: region.cloned(), counts }
}
