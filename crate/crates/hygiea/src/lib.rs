//! File formats, scenario runner and analytics export for `hygiea-core`.

pub mod chaindir;
pub mod export;
pub mod numfmt;
pub mod records;
pub mod scenario;
