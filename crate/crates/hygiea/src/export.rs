//! CSV and JSON renderings of the analytics results, plus seeded synthetic data.

use std::collections::BTreeMap;

use hygiea_core::analytics::{
    daily_new_cases, lof_scores, record_features, regional_comparison, symptom_distribution, AnalyticsError,
    CaseSeries, Day, DisparityReport, HealthRecord, RecordFilter, RecordStore, RegionCode, RegionRow, SirFit,
    SirParams, SprtState, SymptomRow, Symptoms, TestResult,
};
use rand::{Rng, RngCore};
use serde::Serialize;

use crate::numfmt::{sig, to_json};

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn json<T: Serialize>(value: &T) -> String {
    to_json(value).expect("analytics results serialize")
}

pub fn distribution_csv(rows: &[SymptomRow]) -> String {
    csv_text(
        &["symptom", "count", "proportion"],
        rows.iter().map(|r| vec![r.symptom.to_string(), r.count.to_string(), sig(r.proportion)]),
    )
}

pub fn regions_csv(rows: &[RegionRow]) -> String {
    csv_text(
        &["region", "cases", "records", "per_capita"],
        rows.iter().map(|r| {
            vec![
                r.region.to_string(),
                r.cases.to_string(),
                r.records.to_string(),
                r.per_capita.map(sig).unwrap_or_default(),
            ]
        }),
    )
}

pub fn series_csv(series: &CaseSeries) -> String {
    csv_text(&["day", "cases"], series.counts.iter().map(|(d, c)| vec![d.to_string(), sig(*c)]))
}

pub fn lof_csv(scores: &[f64]) -> String {
    csv_text(&["index", "score"], scores.iter().enumerate().map(|(i, s)| vec![i.to_string(), sig(*s)]))
}

#[derive(Serialize)]
pub struct FitOutput<'a> {
    pub region: Option<&'a RegionCode>,
    pub days: usize,
    pub beta: f64,
    pub gamma: f64,
    pub population: f64,
    pub initial_infected: f64,
    pub sse: f64,
    pub degenerate: bool,
}

pub fn fit_json(series: &CaseSeries, fit: &SirFit) -> String {
    json(&FitOutput {
        region: series.region.as_ref(),
        days: series.len(),
        beta: fit.params.beta,
        gamma: fit.params.gamma,
        population: fit.params.population,
        initial_infected: fit.params.i0,
        sse: fit.sse,
        degenerate: fit.degenerate,
    })
}

#[derive(Serialize)]
struct SprtOutput {
    decision: hygiea_core::analytics::Decision,
    steps: u64,
    positives: u64,
    negatives: u64,
    log_lr: f64,
    upper: f64,
    lower: f64,
}

pub fn sprt_json(state: &SprtState) -> String {
    json(&SprtOutput {
        decision: state.decision,
        steps: state.steps(),
        positives: state.positives,
        negatives: state.negatives,
        log_lr: state.log_lr,
        upper: state.upper(),
        lower: state.lower(),
    })
}

pub fn disparity_json(report: &DisparityReport) -> String {
    json(report)
}

/// LOF scores over [`record_features`] of every stored record.
pub fn record_lof(store: &RecordStore, k: usize) -> Result<Vec<f64>, AnalyticsError> {
    let points: Vec<Vec<f64>> = store.records().iter().map(record_features).collect();
    lof_scores(&points, k)
}

/// Standard bundle of tables written by `report` and the reference scenario.
pub fn report_files(
    store: &RecordStore,
    population: Option<&BTreeMap<RegionCode, u64>>,
    fit_population: f64,
    initial_infected: f64,
) -> Vec<(&'static str, String)> {
    use hygiea_core::analytics::{case_series, sir_fit, SirFitConfig};
    let mut files = vec![
        ("distribution.csv", distribution_csv(&symptom_distribution(store, None))),
        ("regions.csv", regions_csv(&regional_comparison(store, population))),
    ];
    let series = case_series(store, None);
    files.push(("cases.csv", series_csv(&series)));
    let fit = match sir_fit(&series, fit_population, &SirFitConfig { initial_infected, ..SirFitConfig::default() }) {
        Ok(fit) => fit_json(&series, &fit),
        Err(e) => json(&serde_json::json!({ "error": e.to_string() })),
    };
    files.push(("fit.json", fit));
    files
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub regions: Vec<RegionCode>,
    pub population: f64,
    pub beta: f64,
    pub gamma: f64,
    pub initial_infected: f64,
    pub days: usize,
    pub start: Day,
    /// Negative tests recorded per positive one.
    pub negatives_per_case: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            regions: vec![RegionCode::new("NORTH").expect("valid"), RegionCode::new("SOUTH").expect("valid")],
            population: 10_000.0,
            beta: 0.3,
            gamma: 0.1,
            initial_infected: 10.0,
            days: 60,
            start: Day::from_ymd(2021, 3, 1).expect("valid date"),
            negatives_per_case: 1,
        }
    }
}

const GROUPS: [&str; 3] = ["18-39", "40-64", "65+"];

/// Positive records follow the rounded SIR daily new cases in every region;
/// negatives and the remaining attributes are drawn from `rng`.
pub fn synth_records(cfg: &SynthConfig, rng: &mut dyn RngCore) -> Result<RecordStore, AnalyticsError> {
    let params = SirParams::new(cfg.beta, cfg.gamma, cfg.population, cfg.initial_infected)?;
    let cases = daily_new_cases(&params, cfg.days);
    let mut store = RecordStore::new();
    for region in &cfg.regions {
        let mut day = cfg.start;
        for &c in &cases {
            let positives = c.round() as u64;
            let negatives = positives * cfg.negatives_per_case as u64;
            for n in 0..positives + negatives {
                let positive = n < positives;
                let mut flags = [false; 12];
                for f in flags.iter_mut() {
                    *f = rng.gen_bool(if positive { 0.35 } else { 0.05 });
                }
                let group = GROUPS[rng.gen_range(0..GROUPS.len())];
                let age = match group {
                    "18-39" => rng.gen_range(18..40),
                    "40-64" => rng.gen_range(40..65),
                    _ => rng.gen_range(65..95),
                };
                let travel = if rng.gen_bool(0.1) {
                    vec![cfg.regions[rng.gen_range(0..cfg.regions.len())].clone()]
                } else {
                    vec![]
                };
                store.ingest(HealthRecord {
                    symptoms: Symptoms::from_flags(flags),
                    age,
                    geolocation: region.clone(),
                    travel_history: travel,
                    past_infections: rng.gen_range(0..2),
                    test_result: if positive { TestResult::Positive } else { TestResult::Negative },
                    demographic_group: group.to_string(),
                    vaccinated: rng.gen_bool(0.6),
                    consent: true,
                    observed_at: day,
                })?;
            }
            day = day.next();
        }
    }
    Ok(store)
}

/// Filter from optional CLI values.
pub fn filter(region: Option<RegionCode>, result: Option<TestResult>, group: Option<String>) -> Option<RecordFilter> {
    if region.is_none() && result.is_none() && group.is_none() {
        return None;
    }
    Some(RecordFilter { region, test_result: result, demographic_group: group, from: None, to: None })
}
