//! Single-validator Proof-of-Authority ledger: hash-linked blocks, explicit
//! sealing, and replay-based integrity checks.

mod block;
mod chain;
mod tx;


pub use block::{Block, BlockHeader};
pub use chain::{ChainState, LedgerError, Violation, ViolationKind};
pub use tx::{SignedTransaction, TxOutcome};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::canonical::to_canonical_bytes;
use crate::contracts::ValidityPolicy;
use crate::crypto::{hash_digest, Digest, GroupParams, PublicKey};
use crate::primitives::Timestamp;

/// Contents of a genesis file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenesisConfig {
    pub chain_name: String,
    pub group: GroupParams,
    /// Must hold exactly one key: the Governing Body.
    pub validators: Vec<PublicKey>,
    #[serde(default)]
    pub genesis_time: Timestamp,
    #[serde(default)]
    pub policy: ValidityPolicy,
}

impl GenesisConfig {
    pub fn new(chain_name: &str, group: GroupParams, validator: PublicKey) -> Self {
        GenesisConfig {
            chain_name: chain_name.into(),
            group,
            validators: alloc::vec![validator],
            genesis_time: 0,
            policy: ValidityPolicy::default(),
        }
    }

    pub fn chain_id(&self) -> Digest {
        hash_digest(&to_canonical_bytes(self))
    }
}
