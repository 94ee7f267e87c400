use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::types::*;
use crate::crypto::PublicKey;
use crate::primitives::{Address, Timestamp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GovernanceEventKind {
    IssuerRegistered,
    VerifierRegistered,
    StatusChanged,
    CertificateRevoked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GovernanceEvent {
    pub kind: GovernanceEventKind,
    pub subject: Address,
    pub at: Timestamp,
}

/// Registry of issuers and verifiers plus the on-chain revocation list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GovernanceState {
    pub owner: PublicKey,
    pub issuers: BTreeMap<PublicKey, IssuerRecord>,
    pub verifiers: BTreeMap<PublicKey, VerifierRecord>,
    pub revoked: Vec<Address>,
    pub events: Vec<GovernanceEvent>,
}

impl GovernanceState {
    pub fn new(owner: PublicKey) -> Self {
        GovernanceState {
            owner,
            issuers: BTreeMap::new(),
            verifiers: BTreeMap::new(),
            revoked: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn issuer_active(&self, pk: &PublicKey) -> bool {
        self.issuers.get(pk).is_some_and(|r| r.attributes.status == PartyStatus::Active)
    }

    pub fn verifier(&self, pk: &PublicKey) -> Option<&VerifierRecord> {
        self.verifiers.get(pk)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoryState {
    pub governance: Address,
    pub policy: ValidityPolicy,
    /// Addresses of every certificate created, in creation order.
    pub issued: Vec<Address>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateState {
    pub certificate: Certificate,
    pub verification_log: Vec<VerificationStamp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractState {
    Governance(GovernanceState),
    Factory(FactoryState),
    Certificate(CertificateState),
}

pub type ContractStore = BTreeMap<Address, ContractState>;
