use alloc::string::String;
use core::fmt;

use num_bigint::BigUint;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use sha3::{Digest as _, Sha3_256};

use crate::hexfmt;

pub const DIGEST_LEN: usize = 32;

/// SHA3-256 output.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hexfmt::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hexfmt::HexError> {
        hexfmt::decode_array(s).map(Digest)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Digest::from_hex(&s).map_err(de::Error::custom)
    }
}

pub fn hash_digest(data: &[u8]) -> Digest {
    Digest(Sha3_256::digest(data).into())
}

/// Hash the concatenation of several byte strings.
pub fn hash_parts(parts: &[&[u8]]) -> Digest {
    let mut h = Sha3_256::new();
    for p in parts {
        h.update(p);
    }
    Digest(h.finalize().into())
}

/// Big-endian interpretation of the digest reduced mod `q`.
pub fn hash_to_scalar(digest: &Digest, q: &BigUint) -> BigUint {
    BigUint::from_bytes_be(&digest.0) % q
}
