//! Health records as JSON lines.

use hygiea_core::analytics::{AnalyticsError, HealthRecord, Ingest, RecordStore};

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: AnalyticsError },
}

/// Parses and ingests every non-blank line. Records without consent are
/// dropped; any malformed line fails the whole file.
pub fn parse_records(text: &str) -> Result<RecordStore, RecordsError> {
    let mut store = RecordStore::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: HealthRecord =
            serde_json::from_str(line).map_err(|source| RecordsError::Parse { line: i + 1, source })?;
        let _: Ingest = store.ingest(r).map_err(|source| RecordsError::Invalid { line: i + 1, source })?;
    }
    Ok(store)
}

pub fn export_records(store: &RecordStore) -> String {
    let mut out = String::new();
    for r in store.records() {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
