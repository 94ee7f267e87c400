use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::crypto::{sign, verify, BindingData, GroupParams, PublicKey, SecretKey, Signature};
use crate::primitives::{signing_message, Address, Timestamp, DAY, HOUR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CertType {
    Vaccination,
    Recovery,
    Test,
}

impl CertType {
    pub const ALL: [CertType; 3] = [CertType::Vaccination, CertType::Recovery, CertType::Test];
}

impl fmt::Display for CertType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertType::Vaccination => "Vaccination",
            CertType::Recovery => "Recovery",
            CertType::Test => "Test",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PartyStatus {
    Active,
    Inactive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LoggingClass {
    /// May only read the ledger.
    ReadOnly,
    /// May also append verification stamps to certificates.
    StateUpdating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Issuer,
    Verifier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuerAttributes {
    pub country: String,
    pub name: String,
    pub id: String,
    pub allowed_types: BTreeSet<CertType>,
    pub valid_from: Timestamp,
    pub status: PartyStatus,
    pub pk: PublicKey,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierAttributes {
    pub country: String,
    pub name: String,
    pub id: String,
    pub valid_from: Timestamp,
    pub status: PartyStatus,
    pub pk: PublicKey,
    pub logging_class: LoggingClass,
}

pub(crate) const ISSUER_DOMAIN: &str = "hygiea/issuer-attestation";
pub(crate) const VERIFIER_DOMAIN: &str = "hygiea/verifier-attestation";
pub(crate) const CERTIFICATE_DOMAIN: &str = "hygiea/certificate";

/// Registry entry for a certificate issuer, attested by the Governing Body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuerRecord {
    pub attributes: IssuerAttributes,
    pub attestation: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierRecord {
    pub attributes: VerifierAttributes,
    pub attestation: Signature,
}

impl IssuerRecord {
    pub fn attest<R: RngCore + ?Sized>(
        attributes: IssuerAttributes,
        gb_sk: &SecretKey,
        params: &GroupParams,
        rng: &mut R,
    ) -> Self {
        let attestation = sign(gb_sk, &signing_message(ISSUER_DOMAIN, &attributes), params, rng);
        IssuerRecord { attributes, attestation }
    }

    pub fn attestation_valid(&self, gb_pk: &PublicKey, params: &GroupParams) -> bool {
        verify(gb_pk, &signing_message(ISSUER_DOMAIN, &self.attributes), &self.attestation, params)
    }
}

impl VerifierRecord {
    pub fn attest<R: RngCore + ?Sized>(
        attributes: VerifierAttributes,
        gb_sk: &SecretKey,
        params: &GroupParams,
        rng: &mut R,
    ) -> Self {
        let attestation = sign(gb_sk, &signing_message(VERIFIER_DOMAIN, &attributes), params, rng);
        VerifierRecord { attributes, attestation }
    }

    pub fn attestation_valid(&self, gb_pk: &PublicKey, params: &GroupParams) -> bool {
        verify(gb_pk, &signing_message(VERIFIER_DOMAIN, &self.attributes), &self.attestation, params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    Issued,
    Revoked,
}

/// Every certificate field covered by the issuer signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateBody {
    pub holder_pk: PublicKey,
    pub personal_identifier: BindingData,
    pub cert_type: CertType,
    pub issuance_date: Timestamp,
    pub valid_from: Timestamp,
    pub expiry_date: Timestamp,
    pub issuer_pk: PublicKey,
    pub governance_address: Address,
}

impl CertificateBody {
    pub fn signing_bytes(&self) -> alloc::vec::Vec<u8> {
        signing_message(CERTIFICATE_DOMAIN, self)
    }

    pub fn sign<R: RngCore + ?Sized>(&self, issuer_sk: &SecretKey, params: &GroupParams, rng: &mut R) -> Signature {
        sign(issuer_sk, &self.signing_bytes(), params, rng)
    }

    pub fn signature_valid(&self, sig: &Signature, params: &GroupParams) -> bool {
        verify(&self.issuer_pk, &self.signing_bytes(), sig, params)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub body: CertificateBody,
    pub status_flag: CertStatus,
    pub issuer_signature: Signature,
}

/// Validity windows per certificate type, fixed at genesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityPolicy {
    pub test_validity: u64,
    pub recovery_validity: u64,
    pub vaccination_validity: u64,
    /// Delay between vaccination and the certificate becoming valid.
    pub vaccination_delay: u64,
}

impl Default for ValidityPolicy {
    fn default() -> Self {
        ValidityPolicy {
            test_validity: 72 * HOUR,
            recovery_validity: 180 * DAY,
            vaccination_validity: 365 * DAY,
            vaccination_delay: 21 * DAY,
        }
    }
}

impl ValidityPolicy {
    pub fn delay(&self, t: CertType) -> u64 {
        match t {
            CertType::Vaccination => self.vaccination_delay,
            CertType::Recovery | CertType::Test => 0,
        }
    }

    pub fn validity(&self, t: CertType) -> u64 {
        match t {
            CertType::Vaccination => self.vaccination_validity,
            CertType::Recovery => self.recovery_validity,
            CertType::Test => self.test_validity,
        }
    }

    /// `(valid_from, expiry_date)` for a certificate issued at `issuance`.
    /// Validity runs from `valid_from`.
    pub fn window(&self, t: CertType, issuance: Timestamp) -> (Timestamp, Timestamp) {
        let from = issuance.saturating_add(self.delay(t));
        (from, from.saturating_add(self.validity(t)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationStamp {
    pub verifier: PublicKey,
    pub timestamp: Timestamp,
}
