use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::crypto::schnorr::{self, ProverState};
use crate::crypto::{
    bind_identity, BindingData, BindingError, BindingMechanism, CivilIdentity, GroupParams, KeyPair, PublicKey,
};
use crate::primitives::Address;

/// Prover side of Schnorr identification. Adversaries implement this with
/// whatever strategy they like.
pub trait Prover {
    fn commit(&mut self, params: &GroupParams, rng: &mut dyn RngCore) -> BigUint;
    fn respond(&mut self, challenge: &BigUint, params: &GroupParams) -> BigUint;
}

/// What a holder does during issuance and verification.
pub trait HolderAgent: Prover {
    /// Key sent as `pk_H`.
    fn public_key(&self) -> PublicKey;
    fn binding(&self, mechanism: BindingMechanism) -> Result<BindingData, BindingError>;
    /// `(B_H, C_H, pk_H)` offered for the certificate at `certificate`.
    fn presentation(&self, certificate: Address) -> Presentation;
    fn receive_certificate(&mut self, certificate: Address, mechanism: BindingMechanism);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    /// `None` when the holder cannot produce a binding.
    pub binding: Option<BindingData>,
    pub certificate: Address,
    pub holder_pk: PublicKey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartyRole {
    GoverningBody,
    Issuer,
    Verifier,
    Holder,
}

/// A simulated participant. Honest by construction.
#[derive(Debug)]
pub struct Party {
    pub id: String,
    pub role: PartyRole,
    pub keys: KeyPair,
    pub identity: Option<CivilIdentity>,
    pub wallet: Vec<Address>,
    mechanisms: BTreeMap<Address, BindingMechanism>,
    session: Option<ProverState>,
}

impl Party {
    pub fn new(id: &str, role: PartyRole, keys: KeyPair) -> Self {
        Party {
            id: id.into(),
            role,
            keys,
            identity: None,
            wallet: Vec::new(),
            mechanisms: BTreeMap::new(),
            session: None,
        }
    }

    pub fn holder(id: &str, keys: KeyPair, identity: CivilIdentity) -> Self {
        let mut p = Party::new(id, PartyRole::Holder, keys);
        p.identity = Some(identity);
        p
    }

    pub fn pk(&self) -> &PublicKey {
        self.keys.public()
    }
}

impl Prover for Party {
    fn commit(&mut self, params: &GroupParams, rng: &mut dyn RngCore) -> BigUint {
        let (i, st) = schnorr::commit(params, rng);
        self.session = Some(st);
        i
    }

    fn respond(&mut self, challenge: &BigUint, params: &GroupParams) -> BigUint {
        match self.session.take() {
            Some(st) => schnorr::respond(self.keys.secret(), st, challenge, params),
            // no open commitment: answer nothing useful
            None => BigUint::default(),
        }
    }
}

impl HolderAgent for Party {
    fn public_key(&self) -> PublicKey {
        self.pk().clone()
    }

    fn binding(&self, mechanism: BindingMechanism) -> Result<BindingData, BindingError> {
        match &self.identity {
            Some(id) => bind_identity(id, mechanism),
            None => bind_identity(&CivilIdentity::new(), mechanism),
        }
    }

    fn presentation(&self, certificate: Address) -> Presentation {
        let mechanism = self.mechanisms.get(&certificate).copied().unwrap_or(BindingMechanism::HashedInfo);
        Presentation { binding: self.binding(mechanism).ok(), certificate, holder_pk: self.pk().clone() }
    }

    fn receive_certificate(&mut self, certificate: Address, mechanism: BindingMechanism) {
        self.wallet.push(certificate);
        self.mechanisms.insert(certificate, mechanism);
    }
}

/// Key-substitution adversary: presents everything `claimed` would, but
/// answers identification challenges with a different secret.
pub struct KeySubstitution<'a> {
    pub claimed: &'a mut dyn HolderAgent,
    secret: crate::crypto::SecretKey,
    session: Option<ProverState>,
}

impl<'a> KeySubstitution<'a> {
    pub fn new(claimed: &'a mut dyn HolderAgent, secret: crate::crypto::SecretKey) -> Self {
        KeySubstitution { claimed, secret, session: None }
    }
}

impl Prover for KeySubstitution<'_> {
    fn commit(&mut self, params: &GroupParams, rng: &mut dyn RngCore) -> BigUint {
        let (i, st) = schnorr::commit(params, rng);
        self.session = Some(st);
        i
    }

    fn respond(&mut self, challenge: &BigUint, params: &GroupParams) -> BigUint {
        match self.session.take() {
            Some(st) => schnorr::respond(&self.secret, st, challenge, params),
            None => BigUint::default(),
        }
    }
}

impl HolderAgent for KeySubstitution<'_> {
    fn public_key(&self) -> PublicKey {
        self.claimed.public_key()
    }

    fn binding(&self, mechanism: BindingMechanism) -> Result<BindingData, BindingError> {
        self.claimed.binding(mechanism)
    }

    fn presentation(&self, certificate: Address) -> Presentation {
        self.claimed.presentation(certificate)
    }

    fn receive_certificate(&mut self, certificate: Address, mechanism: BindingMechanism) {
        self.claimed.receive_certificate(certificate, mechanism)
    }
}
