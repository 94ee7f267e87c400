//! Registration, issuance and verification runs between simulated parties,
//! plus revocation snapshots for offline verification.

mod agents;
mod channel;
mod flows;

pub use agents::{HolderAgent, KeySubstitution, Party, PartyRole, Presentation, Prover};
pub use channel::{Channel, ChannelError, Faults, Message};
pub use flows::{
    export_revocation_snapshot, identify, run_issuance, run_registration, run_verification, IssuanceRequest, Mode,
    Outcome, Reason, RevocationSnapshot, VerificationRequest, VerificationVerdict,
};


use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::analytics::RecordStore;
use crate::contracts::{
    ContractCall, Effect, IssuerAttributes, IssuerRecord, PartyStatus, Revert, Role, VerifierAttributes, VerifierRecord,
};
use crate::crypto::{BindingError, KeyPair, PublicKey};
use crate::ledger::{Block, ChainState, GenesisConfig, LedgerError, SignedTransaction, TxOutcome};
use crate::primitives::{Address, Timestamp, HOUR};

/// Attributes a candidate submits for registration, `(pk, L_1..L_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Application {
    Issuer(IssuerAttributes),
    Verifier(VerifierAttributes),
}

impl Application {
    pub fn pk(&self) -> &PublicKey {
        match self {
            Application::Issuer(a) => &a.pk,
            Application::Verifier(a) => &a.pk,
        }
    }
}

/// Registry entry produced by a successful registration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Registered {
    Issuer(IssuerRecord),
    Verifier(VerifierRecord),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("transport failure: {0}")]
    Transport(#[from] ChannelError),
    #[error("Schnorr identification rejected")]
    IdentificationFailed,
    #[error("civil document check failed")]
    DocumentCheckFailed,
    #[error("holder binding unavailable: {0}")]
    Binding(#[from] BindingError),
    #[error("ledger rejected transaction: {0}")]
    Ledger(#[from] LedgerError),
    #[error("transaction reverted: {0}")]
    Reverted(Revert),
    #[error("governing body key does not match the genesis validator")]
    NotValidator,
}

pub const DEFAULT_MAX_SNAPSHOT_AGE: u64 = 24 * HOUR;

/// The consortium: the chain, the Governing Body that seals it, the message
/// channel between parties and the analytics store fed by consenting holders.
#[derive(Debug)]
pub struct Network {
    chain: ChainState,
    gb: Party,
    pub channel: Channel,
    pub max_snapshot_age: u64,
    records: RecordStore,
}

impl Network {
    pub fn new(config: GenesisConfig, gb: KeyPair) -> Result<Self, ProtocolError> {
        let chain = ChainState::genesis(config)?;
        Self::from_chain(chain, gb)
    }

    pub fn from_chain(chain: ChainState, gb: KeyPair) -> Result<Self, ProtocolError> {
        if gb.public() != chain.validator() {
            return Err(ProtocolError::NotValidator);
        }
        Ok(Network {
            chain,
            gb: Party::new("governing-body", PartyRole::GoverningBody, gb),
            channel: Channel::default(),
            max_snapshot_age: DEFAULT_MAX_SNAPSHOT_AGE,
            records: RecordStore::new(),
        })
    }

    pub fn chain(&self) -> &ChainState {
        &self.chain
    }

    /// Direct ledger access, for scripted transactions and tamper tests.
    pub fn chain_mut(&mut self) -> &mut ChainState {
        &mut self.chain
    }

    pub fn governing_body(&self) -> &Party {
        &self.gb
    }

    pub fn records(&self) -> &RecordStore {
        &self.records
    }

    pub fn records_mut(&mut self) -> &mut RecordStore {
        &mut self.records
    }

    pub fn into_parts(self) -> (ChainState, RecordStore) {
        (self.chain, self.records)
    }

    /// Signs `call` as `sender` with its next nonce and queues it.
    pub fn submit<R: RngCore>(
        &mut self,
        sender: &KeyPair,
        call: ContractCall,
        rng: &mut R,
    ) -> Result<(PublicKey, u64), ProtocolError> {
        let nonce = self.chain.next_nonce(sender.public());
        let tx = SignedTransaction::new(sender, nonce, call, self.chain.params(), rng);
        self.chain.submit(tx)?;
        Ok((sender.public().clone(), nonce))
    }

    /// Governing Body seals everything pending.
    pub fn seal<R: RngCore>(&mut self, now: Timestamp, rng: &mut R) -> Result<&Block, ProtocolError> {
        let sk = self.gb.keys.secret().clone();
        Ok(self.chain.seal(&sk, now, rng)?)
    }

    /// Outcome recorded in the head block for the transaction `(sender, nonce)`.
    pub fn receipt(&self, id: &(PublicKey, u64)) -> Option<&TxOutcome> {
        let head = self.chain.head();
        head.transactions.iter().position(|tx| tx.sender == id.0 && tx.nonce == id.1).map(|i| &head.receipts[i])
    }

    pub(crate) fn submit_and_seal<R: RngCore>(
        &mut self,
        sender: &KeyPair,
        call: ContractCall,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<Effect, ProtocolError> {
        let id = self.submit(sender, call, rng)?;
        self.seal(now, rng)?;
        match self.receipt(&id) {
            Some(TxOutcome::Applied(e)) => Ok(e.clone()),
            Some(TxOutcome::Reverted(r)) => Err(ProtocolError::Reverted(*r)),
            None => unreachable!("sealed block holds every pending transaction"),
        }
    }

    /// Governing Body revokes a certificate and seals the block.
    pub fn revoke<R: RngCore>(
        &mut self,
        certificate: Address,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        let gb = self.gb.keys.clone();
        let call = ContractCall::RevokeCertificate { governance: self.chain.governance_address(), certificate };
        self.submit_and_seal(&gb, call, now, rng).map(|_| ())
    }

    /// Governing Body changes a party's status, re-attesting the attributes.
    pub fn set_status<R: RngCore>(
        &mut self,
        role: Role,
        pk: &PublicKey,
        status: PartyStatus,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        let gb = self.gb.keys.clone();
        let params = self.chain.params().clone();
        let gov = self.chain.governance();
        let attestation = match role {
            Role::Issuer => {
                let mut a =
                    gov.issuers.get(pk).ok_or(ProtocolError::Reverted(Revert::UnknownParty))?.attributes.clone();
                a.status = status;
                IssuerRecord::attest(a, gb.secret(), &params, rng).attestation
            }
            Role::Verifier => {
                let mut a =
                    gov.verifiers.get(pk).ok_or(ProtocolError::Reverted(Revert::UnknownParty))?.attributes.clone();
                a.status = status;
                VerifierRecord::attest(a, gb.secret(), &params, rng).attestation
            }
        };
        let call = ContractCall::SetStatus {
            governance: self.chain.governance_address(),
            role,
            pk: pk.clone(),
            status,
            attestation,
        };
        self.submit_and_seal(&gb, call, now, rng).map(|_| ())
    }

    /// Every transaction ever sealed, in order.
    pub fn sealed_transactions(&self) -> Vec<&SignedTransaction> {
        self.chain.blocks().iter().flat_map(|b| &b.transactions).collect()
    }
}
