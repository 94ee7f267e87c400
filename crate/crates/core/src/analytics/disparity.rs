use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::records::{HealthRecord, RecordStore, TestResult};
use super::AnalyticsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupField {
    DemographicGroup,
    Region,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// Positive results among tested records.
    InfectionRate,
    /// Vaccinated among all records.
    VaccinationRate,
    /// Tested among all records.
    TestingRate,
}

impl Metric {
    /// `(numerator, denominator)` contribution of one record.
    fn counts(self, r: &HealthRecord) -> (u64, u64) {
        let tested = r.test_result != TestResult::NA;
        match self {
            Metric::InfectionRate => ((r.test_result == TestResult::Positive) as u64, tested as u64),
            Metric::VaccinationRate => (r.vaccinated as u64, 1),
            Metric::TestingRate => (tested as u64, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupRate {
    pub group: String,
    pub successes: u64,
    pub total: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisparityWarning {
    pub metric: Metric,
    pub group_a: String,
    pub rate_a: f64,
    pub group_b: String,
    pub rate_b: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisparityReport {
    pub rates: Vec<GroupRate>,
    pub warnings: Vec<DisparityWarning>,
    /// Groups left out because their denominator is zero.
    pub excluded: Vec<String>,
}

/// Pooled two-proportion z statistic. Zero when the pooled rate is 0 or 1.
pub fn two_proportion_z(x1: u64, n1: u64, x2: u64, n2: u64) -> f64 {
    let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64);
    if var <= 0.0 {
        0.0
    } else {
        (p1 - p2) / libm::sqrt(var)
    }
}

fn group_key(r: &HealthRecord, field: GroupField) -> String {
    match field {
        GroupField::DemographicGroup => r.demographic_group.clone(),
        GroupField::Region => r.geolocation.to_string(),
    }
}

/// Pairwise z-tests between group rates; a warning for every pair with
/// `|z| > threshold`.
pub fn disparity_check(
    store: &RecordStore,
    field: GroupField,
    metric: Metric,
    threshold: f64,
) -> Result<DisparityReport, AnalyticsError> {
    let mut groups: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for r in store.records() {
        let (x, n) = metric.counts(r);
        let e = groups.entry(group_key(r, field)).or_default();
        e.0 += x;
        e.1 += n;
    }
    if groups.len() < 2 {
        return Err(AnalyticsError::TooFewGroups(groups.len()));
    }
    let mut rates = Vec::new();
    let mut excluded = Vec::new();
    for (group, (successes, total)) in groups {
        if total == 0 {
            excluded.push(group);
        } else {
            rates.push(GroupRate { group, successes, total, rate: successes as f64 / total as f64 });
        }
    }
    let mut warnings = Vec::new();
    for (i, a) in rates.iter().enumerate() {
        for b in &rates[i + 1..] {
            let z = two_proportion_z(a.successes, a.total, b.successes, b.total);
            if libm::fabs(z) > threshold {
                warnings.push(DisparityWarning {
                    metric,
                    group_a: a.group.clone(),
                    rate_a: a.rate,
                    group_b: b.group.clone(),
                    rate_b: b.rate,
                    z,
                });
            }
        }
    }
    Ok(DisparityReport { rates, warnings, excluded })
}
