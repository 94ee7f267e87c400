//! Contract execution. Every handler finishes all checks before its first
//! write, so a reverted call leaves the store untouched.

use alloc::vec::Vec;

use serde::Serialize;

use super::call::{ContractCall, Effect, Revert};
use super::state::*;
use super::types::*;
use crate::crypto::{GroupParams, PublicKey, Signature};
use crate::primitives::{signing_message, Address, Timestamp};

/// Caller and environment for one call.
pub struct ExecContext<'a> {
    pub params: &'a GroupParams,
    pub sender: &'a PublicKey,
    pub block_time: Timestamp,
}

pub fn execute(store: &mut ContractStore, ctx: &ExecContext<'_>, call: &ContractCall) -> Result<Effect, Revert> {
    match call {
        ContractCall::RegisterIssuer { governance, record } => {
            let gov = governance_mut(store, governance)?;
            only_owner(gov, ctx)?;
            if gov.issuers.contains_key(&record.attributes.pk) {
                return Err(Revert::AlreadyRegistered);
            }
            if !record.attestation_valid(&gov.owner, ctx.params) {
                return Err(Revert::BadAttestation);
            }
            check_issuer_attributes(&record.attributes)?;
            let pk = record.attributes.pk.clone();
            gov.issuers.insert(pk.clone(), record.clone());
            push_event(gov, GovernanceEventKind::IssuerRegistered, Address::of_account(&pk), ctx);
            Ok(Effect::IssuerRegistered(pk))
        }
        ContractCall::RegisterVerifier { governance, record } => {
            let gov = governance_mut(store, governance)?;
            only_owner(gov, ctx)?;
            if gov.verifiers.contains_key(&record.attributes.pk) {
                return Err(Revert::AlreadyRegistered);
            }
            if !record.attestation_valid(&gov.owner, ctx.params) {
                return Err(Revert::BadAttestation);
            }
            let pk = record.attributes.pk.clone();
            gov.verifiers.insert(pk.clone(), record.clone());
            push_event(gov, GovernanceEventKind::VerifierRegistered, Address::of_account(&pk), ctx);
            Ok(Effect::VerifierRegistered(pk))
        }
        ContractCall::SetStatus { governance, role, pk, status, attestation } => {
            let gov = governance_mut(store, governance)?;
            only_owner(gov, ctx)?;
            let owner = gov.owner.clone();
            match role {
                Role::Issuer => {
                    let rec = gov.issuers.get(pk).ok_or(Revert::UnknownParty)?;
                    let mut updated = rec.attributes.clone();
                    updated.status = *status;
                    check_issuer_attributes(&updated)?;
                    check_attestation(ISSUER_DOMAIN, &updated, attestation, &owner, ctx)?;
                    let rec = gov.issuers.get_mut(pk).expect("checked above");
                    rec.attributes = updated;
                    rec.attestation = attestation.clone();
                }
                Role::Verifier => {
                    let rec = gov.verifiers.get(pk).ok_or(Revert::UnknownParty)?;
                    let mut updated = rec.attributes.clone();
                    updated.status = *status;
                    check_attestation(VERIFIER_DOMAIN, &updated, attestation, &owner, ctx)?;
                    let rec = gov.verifiers.get_mut(pk).expect("checked above");
                    rec.attributes = updated;
                    rec.attestation = attestation.clone();
                }
            }
            push_event(gov, GovernanceEventKind::StatusChanged, Address::of_account(pk), ctx);
            Ok(Effect::StatusChanged(pk.clone()))
        }
        ContractCall::RevokeCertificate { governance, certificate } => {
            {
                let gov = governance_ref(store, governance)?;
                if &gov.owner != ctx.sender {
                    return Err(Revert::OnlyGoverningBody);
                }
            }
            match store.get(certificate) {
                Some(ContractState::Certificate(c)) if c.certificate.body.governance_address == *governance => {}
                Some(ContractState::Certificate(_)) => return Err(Revert::WrongGovernance),
                _ => return Err(Revert::UnknownCertificate),
            }
            let cert = certificate_mut(store, certificate)?;
            cert.certificate.status_flag = CertStatus::Revoked;
            let gov = governance_mut(store, governance)?;
            if !gov.revoked.contains(certificate) {
                gov.revoked.push(*certificate);
                push_event(gov, GovernanceEventKind::CertificateRevoked, *certificate, ctx);
            }
            Ok(Effect::CertificateRevoked(*certificate))
        }
        ContractCall::CreateCertificate { factory, body, issuer_signature } => {
            let fac = match store.get(factory) {
                Some(ContractState::Factory(f)) => f,
                Some(_) => return Err(Revert::WrongContractKind),
                None => return Err(Revert::UnknownContract),
            };
            let gov = governance_ref(store, &fac.governance)?;
            check_issuance(gov, fac, ctx, body, issuer_signature)?;
            let address = Address::of_contract(factory, fac.issued.len() as u64);
            let state = CertificateState {
                certificate: Certificate {
                    body: body.clone(),
                    status_flag: CertStatus::Issued,
                    issuer_signature: issuer_signature.clone(),
                },
                verification_log: Vec::new(),
            };
            store.insert(address, ContractState::Certificate(state));
            if let Some(ContractState::Factory(f)) = store.get_mut(factory) {
                f.issued.push(address);
            }
            Ok(Effect::CertificateCreated(address))
        }
        ContractCall::LogVerification { certificate, timestamp } => {
            let cert = match store.get(certificate) {
                Some(ContractState::Certificate(c)) => c,
                _ => return Err(Revert::UnknownCertificate),
            };
            let gov = governance_ref(store, &cert.certificate.body.governance_address)?;
            let verifier = gov.verifier(ctx.sender).ok_or(Revert::NotAVerifier)?;
            let attrs = &verifier.attributes;
            if attrs.status != PartyStatus::Active {
                return Err(Revert::VerifierInactive);
            }
            if ctx.block_time < attrs.valid_from {
                return Err(Revert::VerifierNotYetValid);
            }
            if attrs.logging_class != LoggingClass::StateUpdating {
                return Err(Revert::ReadOnlyVerifier);
            }
            if *timestamp > ctx.block_time {
                return Err(Revert::FutureTimestamp);
            }
            if cert.verification_log.last().is_some_and(|last| last.timestamp > *timestamp) {
                return Err(Revert::TimestampRegression);
            }
            let cert = certificate_mut(store, certificate)?;
            cert.verification_log.push(VerificationStamp { verifier: ctx.sender.clone(), timestamp: *timestamp });
            Ok(Effect::VerificationLogged(*certificate))
        }
    }
}

fn check_issuance(
    gov: &GovernanceState,
    fac: &FactoryState,
    ctx: &ExecContext<'_>,
    body: &CertificateBody,
    sig: &Signature,
) -> Result<(), Revert> {
    let issuer = gov.issuers.get(ctx.sender).ok_or(Revert::IssuerNotRegistered)?;
    let attrs = &issuer.attributes;
    if attrs.status != PartyStatus::Active {
        return Err(Revert::IssuerInactive);
    }
    if ctx.block_time < attrs.valid_from || body.issuance_date < attrs.valid_from {
        return Err(Revert::IssuerNotYetValid);
    }
    if !attrs.allowed_types.contains(&body.cert_type) {
        return Err(Revert::TypeNotAllowed);
    }
    if &body.issuer_pk != ctx.sender {
        return Err(Revert::IssuerMismatch);
    }
    if body.governance_address != fac.governance {
        return Err(Revert::WrongGovernance);
    }
    let policy = &fac.policy;
    let earliest = body.issuance_date.saturating_add(policy.delay(body.cert_type));
    let latest_expiry = body.valid_from.saturating_add(policy.validity(body.cert_type));
    if body.valid_from < body.issuance_date
        || body.valid_from < earliest
        || body.expiry_date < body.valid_from
        || body.expiry_date > latest_expiry
    {
        return Err(Revert::MalformedDates);
    }
    if !body.personal_identifier.is_well_formed() {
        return Err(Revert::MalformedBinding);
    }
    if !body.holder_pk.is_valid(ctx.params) {
        return Err(Revert::InvalidHolderKey);
    }
    if !body.signature_valid(sig, ctx.params) {
        return Err(Revert::BadIssuerSignature);
    }
    Ok(())
}

fn check_issuer_attributes(attrs: &IssuerAttributes) -> Result<(), Revert> {
    if attrs.status == PartyStatus::Active && attrs.allowed_types.is_empty() {
        return Err(Revert::EmptyAllowedTypes);
    }
    Ok(())
}

fn check_attestation<T: Serialize>(
    domain: &str,
    attrs: &T,
    sig: &Signature,
    owner: &PublicKey,
    ctx: &ExecContext<'_>,
) -> Result<(), Revert> {
    if crate::crypto::verify(owner, &signing_message(domain, attrs), sig, ctx.params) {
        Ok(())
    } else {
        Err(Revert::BadAttestation)
    }
}

fn only_owner(gov: &GovernanceState, ctx: &ExecContext<'_>) -> Result<(), Revert> {
    if &gov.owner == ctx.sender {
        Ok(())
    } else {
        Err(Revert::OnlyGoverningBody)
    }
}

fn push_event(gov: &mut GovernanceState, kind: GovernanceEventKind, subject: Address, ctx: &ExecContext<'_>) {
    gov.events.push(GovernanceEvent { kind, subject, at: ctx.block_time });
}

fn governance_ref<'a>(store: &'a ContractStore, at: &Address) -> Result<&'a GovernanceState, Revert> {
    match store.get(at) {
        Some(ContractState::Governance(g)) => Ok(g),
        Some(_) => Err(Revert::WrongContractKind),
        None => Err(Revert::UnknownContract),
    }
}

fn governance_mut<'a>(store: &'a mut ContractStore, at: &Address) -> Result<&'a mut GovernanceState, Revert> {
    match store.get_mut(at) {
        Some(ContractState::Governance(g)) => Ok(g),
        Some(_) => Err(Revert::WrongContractKind),
        None => Err(Revert::UnknownContract),
    }
}

fn certificate_mut<'a>(store: &'a mut ContractStore, at: &Address) -> Result<&'a mut CertificateState, Revert> {
    match store.get_mut(at) {
        Some(ContractState::Certificate(c)) => Ok(c),
        _ => Err(Revert::UnknownCertificate),
    }
}
