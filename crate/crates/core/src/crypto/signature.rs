//! Schnorr signatures: Fiat-Shamir over the identification scheme with
//! challenge `c = H(I || pk || msg) mod q`, group elements encoded at fixed
//! width.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::hash::{hash_parts, hash_to_scalar};
use super::{CryptoError, GroupParams, PublicKey, SecretKey};
use crate::hexfmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signature {
    #[serde(with = "hexfmt::biguint")]
    pub c: BigUint,
    #[serde(with = "hexfmt::biguint")]
    pub z: BigUint,
}

fn challenge(params: &GroupParams, commitment: &BigUint, pk: &PublicKey, msg: &[u8]) -> BigUint {
    let i = params.encode_element(commitment);
    let p = params.encode_element(pk.element());
    hash_to_scalar(&hash_parts(&[&i, &p, msg]), params.q())
}

pub fn sign<R: RngCore + ?Sized>(sk: &SecretKey, msg: &[u8], params: &GroupParams, rng: &mut R) -> Signature {
    let k = params.random_nonzero_scalar(rng);
    sign_with_nonce(sk, msg, params, &k).expect("sampled nonce is in range")
}

/// Deterministic signing with a caller-chosen nonce `k` in `[1, q - 1]`.
pub fn sign_with_nonce(
    sk: &SecretKey,
    msg: &[u8],
    params: &GroupParams,
    k: &BigUint,
) -> Result<Signature, CryptoError> {
    if k.is_zero() || k >= params.q() {
        return Err(CryptoError::NonceOutOfRange);
    }
    let pk = sk.public_key(params);
    let commitment = params.pow_g(k);
    let c = challenge(params, &commitment, &pk, msg);
    let z = (k + &c * sk.scalar()) % params.q();
    Ok(Signature { c, z })
}

pub fn verify(pk: &PublicKey, msg: &[u8], sig: &Signature, params: &GroupParams) -> bool {
    if !params.is_scalar(&sig.c) || !params.is_scalar(&sig.z) || !pk.is_valid(params) {
        return false;
    }
    // I' = g^z * pk^(q - c)
    let neg_c = (params.q() - &sig.c) % params.q();
    let commitment = params.mul(&params.pow_g(&sig.z), &params.pow(pk.element(), &neg_c));
    if commitment.is_one() {
        // only reachable with a zero nonce, which signing never uses
        return false;
    }
    challenge(params, &commitment, pk, msg) == sig.c
}
