use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::state::*;
use super::types::*;
use crate::crypto::{GroupParams, PublicKey};
use crate::primitives::{Address, Timestamp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectiveStatus {
    Valid,
    NotYetValid,
    Expired,
    Revoked,
    InvalidSignature,
    IssuerUntrusted,
}

/// Certificate status at `now`. Conditions are tested in a fixed order:
/// revocation, issuer signature, issuer standing, then the validity window.
pub fn effective_status(
    cert: &Certificate,
    now: Timestamp,
    registry: &GovernanceState,
    params: &GroupParams,
) -> EffectiveStatus {
    if cert.status_flag == CertStatus::Revoked {
        return EffectiveStatus::Revoked;
    }
    if !cert.body.signature_valid(&cert.issuer_signature, params) {
        return EffectiveStatus::InvalidSignature;
    }
    if !registry.issuer_active(&cert.body.issuer_pk) {
        return EffectiveStatus::IssuerUntrusted;
    }
    if now < cert.body.valid_from {
        return EffectiveStatus::NotYetValid;
    }
    if now > cert.body.expiry_date {
        return EffectiveStatus::Expired;
    }
    EffectiveStatus::Valid
}

/// Result of a read-only contract query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryValue {
    Key(PublicKey),
    Address(Address),
    Count(u64),
    Addresses(Vec<Address>),
    Issuers(Vec<IssuerRecord>),
    Verifiers(Vec<VerifierRecord>),
    Certificate(Certificate),
    CertStatus(CertStatus),
    Log(Vec<VerificationStamp>),
    Policy(ValidityPolicy),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("no contract at address {0}")]
    NotFound(Address),
    #[error("unknown selector `{0}`")]
    UnknownSelector(String),
}

impl ContractState {
    pub fn selectors(&self) -> &'static [&'static str] {
        match self {
            ContractState::Governance(_) => &["owner", "issuers", "verifiers", "revoked"],
            ContractState::Factory(_) => &["governance", "issued", "count", "policy"],
            ContractState::Certificate(_) => &["certificate", "status", "holder", "log"],
        }
    }

    pub fn query(&self, selector: &str) -> Result<QueryValue, QueryError> {
        let v = match (self, selector) {
            (ContractState::Governance(g), "owner") => QueryValue::Key(g.owner.clone()),
            (ContractState::Governance(g), "issuers") => QueryValue::Issuers(g.issuers.values().cloned().collect()),
            (ContractState::Governance(g), "verifiers") => {
                QueryValue::Verifiers(g.verifiers.values().cloned().collect())
            }
            (ContractState::Governance(g), "revoked") => QueryValue::Addresses(g.revoked.clone()),
            (ContractState::Factory(f), "governance") => QueryValue::Address(f.governance),
            (ContractState::Factory(f), "issued") => QueryValue::Addresses(f.issued.clone()),
            (ContractState::Factory(f), "count") => QueryValue::Count(f.issued.len() as u64),
            (ContractState::Factory(f), "policy") => QueryValue::Policy(f.policy),
            (ContractState::Certificate(c), "certificate") => QueryValue::Certificate(c.certificate.clone()),
            (ContractState::Certificate(c), "status") => QueryValue::CertStatus(c.certificate.status_flag),
            (ContractState::Certificate(c), "holder") => QueryValue::Key(c.certificate.body.holder_pk.clone()),
            (ContractState::Certificate(c), "log") => QueryValue::Log(c.verification_log.clone()),
            _ => return Err(QueryError::UnknownSelector(selector.into())),
        };
        Ok(v)
    }
}
