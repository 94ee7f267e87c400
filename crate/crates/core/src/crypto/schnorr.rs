//! Schnorr's three-round identification scheme.
//!
//! The prover commits to `I = g^k`, the verifier replies with a challenge
//! `r` drawn from `Z_q`, the prover answers `s = k + r*sk mod q`, and the
//! verifier accepts iff `g^s = I * pk^r (mod p)`.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use super::{CryptoError, GroupParams, PublicKey, SecretKey};

/// Prover-side state between commit and respond. Consumed by
/// [`respond`], so a nonce can answer at most one challenge.
pub struct ProverState {
    nonce: BigUint,
}

impl core::fmt::Debug for ProverState {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("ProverState(..)")
    }
}

/// Everything the verifier sees in one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub commitment: BigUint,
    pub challenge: BigUint,
    pub response: BigUint,
}

pub fn commit<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> (BigUint, ProverState) {
    let k = params.random_nonzero_scalar(rng);
    commit_with_nonce(params, k).expect("sampled nonce is in range")
}

pub fn commit_with_nonce(params: &GroupParams, nonce: BigUint) -> Result<(BigUint, ProverState), CryptoError> {
    if nonce.is_zero() || &nonce >= params.q() {
        return Err(CryptoError::NonceOutOfRange);
    }
    Ok((params.pow_g(&nonce), ProverState { nonce }))
}

pub fn challenge<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> BigUint {
    params.random_scalar(rng)
}

pub fn respond(sk: &SecretKey, state: ProverState, challenge: &BigUint, params: &GroupParams) -> BigUint {
    (state.nonce + challenge * sk.scalar()) % params.q()
}

pub fn check(
    pk: &PublicKey,
    commitment: &BigUint,
    challenge: &BigUint,
    response: &BigUint,
    params: &GroupParams,
) -> bool {
    if !params.is_scalar(challenge) || !params.is_scalar(response) {
        return false;
    }
    if !params.is_element(commitment) || !pk.is_valid(params) {
        return false;
    }
    let lhs = params.pow_g(response);
    let rhs = params.mul(commitment, &params.pow(pk.element(), challenge));
    lhs == rhs
}

/// Recover the secret from two accepting transcripts that share a
/// commitment but differ in challenge: `(s1 - s2) / (r1 - r2) mod q`.
pub fn extract_secret(params: &GroupParams, a: &Transcript, b: &Transcript) -> Option<BigUint> {
    if a.commitment != b.commitment || a.challenge == b.challenge {
        return None;
    }
    let q = params.q();
    let ds = (&a.response + q - &b.response) % q;
    let dr = (&a.challenge + q - &b.challenge) % q;
    Some(ds * params.scalar_inverse(&dr)? % q)
}
