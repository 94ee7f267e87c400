//! Governance registry, certificate factory and certificate records, run as
//! deterministic state machines inside sealed ledger blocks.

mod call;
mod exec;
mod state;
mod status;
mod types;

pub use call::{ContractCall, Effect, Revert};
pub use exec::{execute, ExecContext};
pub use state::*;
pub use status::{effective_status, EffectiveStatus, QueryError, QueryValue};
pub use types::*;

#[cfg(test)]
mod tests;
