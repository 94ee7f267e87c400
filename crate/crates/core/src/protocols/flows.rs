use alloc::collections::BTreeSet;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::agents::{HolderAgent, Party, Prover};
use super::channel::{expect_msg, Channel, Message};
use super::{Application, Network, ProtocolError, Registered};
use crate::analytics::HealthRecord;
use crate::contracts::{
    effective_status, CertType, CertificateBody, ContractCall, ContractState, Effect, EffectiveStatus, IssuerRecord,
    LoggingClass, PartyStatus, VerifierRecord,
};
use crate::crypto::{schnorr, BindingMechanism, GroupParams, PublicKey};
use crate::ledger::ChainState;
use crate::primitives::{Address, Timestamp};

/// Schnorr identification of `prover` as the owner of `pk`, run over `chan`.
pub fn identify<R: RngCore>(
    chan: &mut Channel,
    prover: &mut dyn Prover,
    pk: &PublicKey,
    params: &GroupParams,
    rng: &mut R,
) -> Result<bool, ProtocolError> {
    chan.send(Message::Commitment(prover.commit(params, rng)));
    let commitment = expect_msg!(chan, Commitment);
    chan.send(Message::Challenge(schnorr::challenge(params, rng)));
    let challenge = expect_msg!(chan, Challenge);
    chan.send(Message::Response(prover.respond(&challenge, params)));
    let response = expect_msg!(chan, Response);
    Ok(schnorr::check(pk, &commitment, &challenge, &response, params))
}

/// Registration of an issuer or verifier by the Governing Body. The
/// candidate sends its application, proves ownership of the key in it, and
/// on success the attested record is written and sealed at `now`.
pub fn run_registration<R: RngCore>(
    net: &mut Network,
    candidate: &mut dyn Prover,
    application: Application,
    now: Timestamp,
    rng: &mut R,
) -> Result<Registered, ProtocolError> {
    let params = net.chain().params().clone();
    net.channel.reset();
    net.channel.send(Message::Application(application));
    let application = expect_msg!(net.channel, Application);
    if !identify(&mut net.channel, candidate, application.pk(), &params, rng)? {
        return Err(ProtocolError::IdentificationFailed);
    }
    let gb = net.governing_body().keys.clone();
    let governance = net.chain().governance_address();
    let (call, registered) = match application {
        Application::Issuer(a) => {
            let record = IssuerRecord::attest(a, gb.secret(), &params, rng);
            (ContractCall::RegisterIssuer { governance, record: record.clone() }, Registered::Issuer(record))
        }
        Application::Verifier(a) => {
            let record = VerifierRecord::attest(a, gb.secret(), &params, rng);
            (ContractCall::RegisterVerifier { governance, record: record.clone() }, Registered::Verifier(record))
        }
    };
    net.submit_and_seal(&gb, call, now, rng)?;
    Ok(registered)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuanceRequest {
    pub cert_type: CertType,
    pub mechanism: BindingMechanism,
    /// Outcome of the issuer's in-person document check.
    pub document_check: bool,
    pub clinical: Option<HealthRecord>,
    pub consent: bool,
}

/// Certificate issuance. Returns the new certificate's address, which is
/// also delivered to the holder's wallet.
pub fn run_issuance<R: RngCore>(
    net: &mut Network,
    issuer: &Party,
    holder: &mut dyn HolderAgent,
    request: IssuanceRequest,
    now: Timestamp,
    rng: &mut R,
) -> Result<Address, ProtocolError> {
    let params = net.chain().params().clone();
    net.channel.reset();
    net.channel.send(Message::Key(holder.public_key()));
    let holder_pk = expect_msg!(net.channel, Key);
    if !request.document_check {
        return Err(ProtocolError::DocumentCheckFailed);
    }
    if !identify(&mut net.channel, holder, &holder_pk, &params, rng)? {
        return Err(ProtocolError::IdentificationFailed);
    }
    net.channel.send(Message::Binding(holder.binding(request.mechanism)?));
    let binding = expect_msg!(net.channel, Binding);

    let factory = net.chain().factory_address();
    let policy = match net.chain().contract(&factory) {
        Some(ContractState::Factory(f)) => f.policy,
        _ => unreachable!("factory deployed at genesis"),
    };
    let (valid_from, expiry_date) = policy.window(request.cert_type, now);
    let body = CertificateBody {
        holder_pk,
        personal_identifier: binding,
        cert_type: request.cert_type,
        issuance_date: now,
        valid_from,
        expiry_date,
        issuer_pk: issuer.pk().clone(),
        governance_address: net.chain().governance_address(),
    };
    let issuer_signature = body.sign(issuer.keys.secret(), &params, rng);
    let call = ContractCall::CreateCertificate { factory, body, issuer_signature };
    let address = match net.submit_and_seal(&issuer.keys, call, now, rng)? {
        Effect::CertificateCreated(a) => a,
        other => unreachable!("factory returned {other:?}"),
    };

    net.channel.send(Message::CertificateAddress(address));
    let address = expect_msg!(net.channel, CertificateAddress);
    holder.receive_certificate(address, request.mechanism);

    if let Some(mut record) = request.clinical {
        record.consent = request.consent;
        // rejected records are dropped; the certificate stands either way
        let _ = net.records_mut().ingest(record);
    }
    Ok(address)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Online,
    Offline,
}

/// Exported revocation list for offline verifiers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevocationSnapshot {
    pub revoked: BTreeSet<Address>,
    pub as_of: Timestamp,
}

/// Revocation list at chain head. `as_of` is the earlier of `now` and the
/// head block's timestamp.
pub fn export_revocation_snapshot(chain: &ChainState, now: Timestamp) -> RevocationSnapshot {
    RevocationSnapshot {
        revoked: chain.governance().revoked.iter().copied().collect(),
        as_of: now.min(chain.head().timestamp),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Ok,
    VerifierNotAuthorized,
    MissingSnapshot,
    StaleSnapshot,
    Transport,
    UnknownCertificate,
    HolderKeyMismatch,
    DocumentCheckFailed,
    IdentificationFailed,
    Revoked,
    InvalidSignature,
    IssuerUntrusted,
    NotYetValid,
    Expired,
    BindingMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRequest {
    /// Certificate the holder is asked to present.
    pub certificate: Address,
    pub mode: Mode,
    pub snapshot: Option<RevocationSnapshot>,
    pub document_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationVerdict {
    pub outcome: Outcome,
    pub reason: Reason,
    pub mode: Mode,
    pub checked_at: Timestamp,
    /// Certificate the holder presented.
    pub certificate: Address,
    /// A log_verification transaction was queued for the next block.
    pub logged: bool,
}

/// Certificate verification. Online mode reads revocation from the chain;
/// offline mode takes it from the snapshot and everything else from the
/// verifier's cached copy of the chain.
pub fn run_verification<R: RngCore>(
    net: &mut Network,
    verifier: &Party,
    holder: &mut dyn HolderAgent,
    request: &VerificationRequest,
    now: Timestamp,
    rng: &mut R,
) -> VerificationVerdict {
    let mut verdict = VerificationVerdict {
        outcome: Outcome::Reject,
        reason: Reason::Ok,
        mode: request.mode,
        checked_at: now,
        certificate: request.certificate,
        logged: false,
    };
    match check(net, verifier, holder, request, now, &mut verdict.certificate, rng) {
        Ok(()) => {
            verdict.outcome = Outcome::Accept;
            verdict.logged = request.mode == Mode::Online && log(net, verifier, verdict.certificate, now, rng);
        }
        Err(reason) => verdict.reason = reason,
    }
    verdict
}

fn log<R: RngCore>(net: &mut Network, verifier: &Party, certificate: Address, now: Timestamp, rng: &mut R) -> bool {
    let state_updating = net
        .chain()
        .governance()
        .verifier(verifier.pk())
        .is_some_and(|v| v.attributes.logging_class == LoggingClass::StateUpdating);
    if !state_updating {
        return false;
    }
    let call = ContractCall::LogVerification { certificate, timestamp: now };
    net.submit(&verifier.keys, call, rng).is_ok()
}

fn check<R: RngCore>(
    net: &mut Network,
    verifier: &Party,
    holder: &mut dyn HolderAgent,
    request: &VerificationRequest,
    now: Timestamp,
    presented: &mut Address,
    rng: &mut R,
) -> Result<(), Reason> {
    let params = net.chain().params().clone();
    let registry = net.chain().governance().clone();
    let authorised = registry
        .verifier(verifier.pk())
        .is_some_and(|v| v.attributes.status == PartyStatus::Active && v.attributes.valid_from <= now);
    if !authorised {
        return Err(Reason::VerifierNotAuthorized);
    }
    let snapshot = match (request.mode, &request.snapshot) {
        (Mode::Online, _) => None,
        (Mode::Offline, None) => return Err(Reason::MissingSnapshot),
        (Mode::Offline, Some(s)) => {
            if now.saturating_sub(s.as_of) > net.max_snapshot_age {
                return Err(Reason::StaleSnapshot);
            }
            Some(s)
        }
    };

    let chan = &mut net.channel;
    chan.reset();
    chan.send(Message::Presentation(holder.presentation(request.certificate)));
    let presentation = match chan.recv() {
        Ok(Message::Presentation(p)) => p,
        _ => return Err(Reason::Transport),
    };
    *presented = presentation.certificate;

    let mut cert = match net.chain().contract(&presentation.certificate) {
        Some(ContractState::Certificate(c)) => c.certificate.clone(),
        _ => return Err(Reason::UnknownCertificate),
    };
    if cert.body.holder_pk != presentation.holder_pk {
        return Err(Reason::HolderKeyMismatch);
    }
    if !request.document_check {
        return Err(Reason::DocumentCheckFailed);
    }
    match identify(&mut net.channel, holder, &presentation.holder_pk, &params, rng) {
        Ok(true) => {}
        Ok(false) => return Err(Reason::IdentificationFailed),
        Err(_) => return Err(Reason::Transport),
    }
    if let Some(s) = snapshot {
        cert.status_flag = if s.revoked.contains(&presentation.certificate) {
            crate::contracts::CertStatus::Revoked
        } else {
            crate::contracts::CertStatus::Issued
        };
    }
    match effective_status(&cert, now, &registry, &params) {
        EffectiveStatus::Valid => {}
        EffectiveStatus::Revoked => return Err(Reason::Revoked),
        EffectiveStatus::InvalidSignature => return Err(Reason::InvalidSignature),
        EffectiveStatus::IssuerUntrusted => return Err(Reason::IssuerUntrusted),
        EffectiveStatus::NotYetValid => return Err(Reason::NotYetValid),
        EffectiveStatus::Expired => return Err(Reason::Expired),
    }
    if presentation.binding.as_ref() != Some(&cert.body.personal_identifier) {
        return Err(Reason::BindingMismatch);
    }
    if !cert.body.signature_valid(&cert.issuer_signature, &params) {
        return Err(Reason::InvalidSignature);
    }
    Ok(())
}
