use core::fmt;

use serde::{Deserialize, Serialize};

use super::types::*;
use crate::crypto::{PublicKey, Signature};
use crate::primitives::{Address, Timestamp};

/// Transaction payload: one call into a deployed contract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum ContractCall {
    RegisterIssuer {
        governance: Address,
        record: IssuerRecord,
    },
    RegisterVerifier {
        governance: Address,
        record: VerifierRecord,
    },
    /// The attestation is re-issued over the attributes with the new status.
    SetStatus {
        governance: Address,
        role: Role,
        pk: PublicKey,
        status: PartyStatus,
        attestation: Signature,
    },
    RevokeCertificate {
        governance: Address,
        certificate: Address,
    },
    CreateCertificate {
        factory: Address,
        body: CertificateBody,
        issuer_signature: Signature,
    },
    LogVerification {
        certificate: Address,
        timestamp: Timestamp,
    },
}

impl ContractCall {
    pub fn target(&self) -> Address {
        match self {
            ContractCall::RegisterIssuer { governance, .. }
            | ContractCall::RegisterVerifier { governance, .. }
            | ContractCall::SetStatus { governance, .. }
            | ContractCall::RevokeCertificate { governance, .. } => *governance,
            ContractCall::CreateCertificate { factory, .. } => *factory,
            ContractCall::LogVerification { certificate, .. } => *certificate,
        }
    }
}

/// State change produced by a successful call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Effect {
    IssuerRegistered(PublicKey),
    VerifierRegistered(PublicKey),
    StatusChanged(PublicKey),
    CertificateRevoked(Address),
    CertificateCreated(Address),
    VerificationLogged(Address),
}

/// Machine-readable reason a call was reverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Revert {
    UnknownContract,
    WrongContractKind,
    OnlyGoverningBody,
    AlreadyRegistered,
    BadAttestation,
    EmptyAllowedTypes,
    UnknownParty,
    UnknownCertificate,
    IssuerNotRegistered,
    IssuerInactive,
    IssuerNotYetValid,
    TypeNotAllowed,
    IssuerMismatch,
    WrongGovernance,
    MalformedDates,
    MalformedBinding,
    InvalidHolderKey,
    BadIssuerSignature,
    NotAVerifier,
    VerifierInactive,
    VerifierNotYetValid,
    ReadOnlyVerifier,
    FutureTimestamp,
    TimestampRegression,
}

impl fmt::Display for Revert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Revert::UnknownContract => "no contract at target address",
            Revert::WrongContractKind => "target contract does not accept this call",
            Revert::OnlyGoverningBody => "only Governing Body",
            Revert::AlreadyRegistered => "public key already registered",
            Revert::BadAttestation => "attestation does not verify under the Governing Body key",
            Revert::EmptyAllowedTypes => "active issuer must allow at least one certificate type",
            Revert::UnknownParty => "public key not registered",
            Revert::UnknownCertificate => "no certificate at address",
            Revert::IssuerNotRegistered => "caller is not a registered issuer",
            Revert::IssuerInactive => "issuer is inactive",
            Revert::IssuerNotYetValid => "issuer registration not yet valid",
            Revert::TypeNotAllowed => "issuer not allowed to issue this certificate type",
            Revert::IssuerMismatch => "certificate issuer differs from caller",
            Revert::WrongGovernance => "certificate names a different governance contract",
            Revert::MalformedDates => "certificate dates violate the validity policy",
            Revert::MalformedBinding => "malformed identity binding",
            Revert::InvalidHolderKey => "holder key is not a group element",
            Revert::BadIssuerSignature => "issuer signature does not verify",
            Revert::NotAVerifier => "caller is not a registered verifier",
            Revert::VerifierInactive => "verifier is inactive",
            Revert::VerifierNotYetValid => "verifier registration not yet valid",
            Revert::ReadOnlyVerifier => "read-only verifiers cannot update state",
            Revert::FutureTimestamp => "timestamp is after the block time",
            Revert::TimestampRegression => "timestamp precedes the last log entry",
        };
        f.write_str(s)
    }
}
