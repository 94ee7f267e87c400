use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::contracts::{ContractCall, Effect, Revert};
use crate::crypto::{sign, verify, GroupParams, KeyPair, PublicKey, Signature};
use crate::primitives::signing_message;

const TX_DOMAIN: &str = "hygiea/tx";

#[derive(Serialize)]
struct TxBody<'a> {
    sender: &'a PublicKey,
    nonce: u64,
    payload: &'a ContractCall,
}

/// A contract call signed by its sender.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedTransaction {
    pub sender: PublicKey,
    pub nonce: u64,
    pub payload: ContractCall,
    pub signature: Signature,
}

impl SignedTransaction {
    pub fn new<R: RngCore + ?Sized>(
        sender: &KeyPair,
        nonce: u64,
        payload: ContractCall,
        params: &GroupParams,
        rng: &mut R,
    ) -> Self {
        let msg = signing_message(TX_DOMAIN, &TxBody { sender: sender.public(), nonce, payload: &payload });
        let signature = sign(sender.secret(), &msg, params, rng);
        SignedTransaction { sender: sender.public().clone(), nonce, payload, signature }
    }

    pub fn signature_valid(&self, params: &GroupParams) -> bool {
        let msg =
            signing_message(TX_DOMAIN, &TxBody { sender: &self.sender, nonce: self.nonce, payload: &self.payload });
        verify(&self.sender, &msg, &self.signature, params)
    }
}

/// What happened to a transaction when its block was sealed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxOutcome {
    Applied(Effect),
    Reverted(Revert),
}

impl TxOutcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, TxOutcome::Applied(_))
    }
}
