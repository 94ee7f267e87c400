use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tx::{SignedTransaction, TxOutcome};
use crate::canonical::to_canonical_bytes;
use crate::crypto::{hash_digest, Digest, Signature};
use crate::primitives::{signing_message, Timestamp};

pub(crate) const HEADER_DOMAIN: &str = "hygiea/block";

/// The part of a block covered by the parent link and the validator seal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockHeader {
    pub chain_id: Digest,
    pub height: u64,
    pub parent_hash: Digest,
    pub timestamp: Timestamp,
    pub tx_root: Digest,
    pub receipts_root: Digest,
    pub state_root: Digest,
}

impl BlockHeader {
    pub fn hash(&self) -> Digest {
        hash_digest(&to_canonical_bytes(self))
    }

    pub fn signing_bytes(&self) -> Vec<u8> {
        signing_message(HEADER_DOMAIN, self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub chain_id: Digest,
    pub height: u64,
    pub parent_hash: Digest,
    pub timestamp: Timestamp,
    pub transactions: Vec<SignedTransaction>,
    pub receipts: Vec<TxOutcome>,
    pub state_root: Digest,
    /// Absent only on the genesis block, which is fixed by the config.
    pub validator_signature: Option<Signature>,
}

impl Block {
    pub fn header(&self) -> BlockHeader {
        BlockHeader {
            chain_id: self.chain_id,
            height: self.height,
            parent_hash: self.parent_hash,
            timestamp: self.timestamp,
            tx_root: hash_digest(&to_canonical_bytes(&self.transactions)),
            receipts_root: hash_digest(&to_canonical_bytes(&self.receipts)),
            state_root: self.state_root,
        }
    }

    pub fn hash(&self) -> Digest {
        self.header().hash()
    }
}
