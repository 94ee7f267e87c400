use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::canonical::to_canonical;
use crate::crypto::{hash_digest, hash_parts, PublicKey};
use crate::hexfmt;

/// Seconds since the simulation epoch. Never read from a wall clock.
pub type Timestamp = u64;

pub const HOUR: u64 = 3_600;
pub const DAY: u64 = 86_400;

pub const ADDRESS_LEN: usize = 20;

/// 20-byte account or contract address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub [u8; ADDRESS_LEN]);

impl Address {
    /// Last 20 bytes of the hash of the public key's minimal encoding.
    pub fn of_account(pk: &PublicKey) -> Self {
        Self::tail(hash_digest(&pk.to_bytes()).0)
    }

    /// Last 20 bytes of `H(creator || nonce)`, nonce as 8 big-endian bytes.
    pub fn of_contract(creator: &Address, nonce: u64) -> Self {
        Self::tail(hash_parts(&[&creator.0, &nonce.to_be_bytes()]).0)
    }

    fn tail(d: [u8; 32]) -> Self {
        let mut a = [0u8; ADDRESS_LEN];
        a.copy_from_slice(&d[32 - ADDRESS_LEN..]);
        Address(a)
    }

    pub fn to_hex(&self) -> String {
        hexfmt::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hexfmt::HexError> {
        hexfmt::decode_array(s).map(Address)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({})", self.to_hex())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Address::from_hex(&s).map_err(de::Error::custom)
    }
}

/// Bytes that get signed for `value` under a domain tag, so a signature
/// made for one purpose never verifies for another.
pub fn signing_message<T: Serialize + ?Sized>(domain: &str, value: &T) -> Vec<u8> {
    let mut out = Vec::from(domain.as_bytes());
    out.push(b':');
    out.extend_from_slice(to_canonical(value).as_bytes());
    out
}
