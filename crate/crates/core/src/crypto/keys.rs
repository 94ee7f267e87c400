use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{CryptoError, GroupParams};
use crate::hexfmt;

/// Secret scalar in `[1, q - 1]`. Deliberately has no `Serialize` impl.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey(BigUint);

impl SecretKey {
    pub fn new(params: &GroupParams, sk: BigUint) -> Result<Self, CryptoError> {
        if sk.is_zero() || &sk >= params.q() {
            return Err(CryptoError::SecretOutOfRange);
        }
        Ok(SecretKey(sk))
    }

    pub fn scalar(&self) -> &BigUint {
        &self.0
    }

    /// Lowercase hex of the secret, for operator key files only.
    pub fn expose_hex(&self) -> String {
        hexfmt::biguint_to_hex(&self.0)
    }

    pub fn public_key(&self, params: &GroupParams) -> PublicKey {
        PublicKey(params.pow_g(&self.0))
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

/// Group element `g^sk mod p`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PublicKey(BigUint);

impl PublicKey {
    pub fn from_element(x: BigUint) -> Self {
        PublicKey(x)
    }

    pub fn element(&self) -> &BigUint {
        &self.0
    }

    /// Minimal big-endian bytes; the input to account-address derivation.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes_be()
    }

    pub fn to_hex(&self) -> String {
        hexfmt::biguint_to_hex(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hexfmt::HexError> {
        hexfmt::biguint_from_hex(s).map(PublicKey)
    }

    pub fn is_valid(&self, params: &GroupParams) -> bool {
        params.is_element(&self.0)
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.to_hex();
        if h.len() > 16 {
            write!(f, "PublicKey({}..)", &h[..16])
        } else {
            write!(f, "PublicKey({h})")
        }
    }
}

impl fmt::Display for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for PublicKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for PublicKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PublicKey::from_hex(&s).map_err(de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct KeyPair {
    sk: SecretKey,
    pk: PublicKey,
}

impl KeyPair {
    pub fn from_secret(params: &GroupParams, sk: BigUint) -> Result<Self, CryptoError> {
        let sk = SecretKey::new(params, sk)?;
        let pk = sk.public_key(params);
        Ok(KeyPair { sk, pk })
    }

    pub fn secret(&self) -> &SecretKey {
        &self.sk
    }

    pub fn public(&self) -> &PublicKey {
        &self.pk
    }
}

/// Sample a fresh key pair from `rng`.
pub fn keygen<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> KeyPair {
    let sk = params.random_nonzero_scalar(rng);
    KeyPair::from_secret(params, sk).expect("sampled scalar is in range")
}
