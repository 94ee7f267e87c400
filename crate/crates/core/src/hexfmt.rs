//! Strict lowercase hex used by every exported key, digest and scalar.
//!
//! Decoding rejects uppercase digits and non-minimal big-integer encodings,
//! so each value has exactly one textual form.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HexError {
    #[error("hex string has odd length")]
    OddLength,
    #[error("invalid hex digit {0:?}")]
    InvalidDigit(char),
    #[error("expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("non-minimal integer encoding")]
    NonMinimal,
    #[error("empty hex string")]
    Empty,
}

pub fn decode(s: &str) -> Result<Vec<u8>, HexError> {
    if !s.len().is_multiple_of(2) {
        return Err(HexError::OddLength);
    }
    if let Some(bad) = s.chars().find(|c| !matches!(c, '0'..='9' | 'a'..='f')) {
        return Err(HexError::InvalidDigit(bad));
    }
    // Digits were checked above.
    Ok(hex::decode(s).expect("validated hex"))
}

pub fn decode_array<const N: usize>(s: &str) -> Result<[u8; N], HexError> {
    let bytes = decode(s)?;
    bytes.try_into().map_err(|b: Vec<u8>| HexError::Length { expected: N, found: b.len() })
}

pub fn encode(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

pub fn biguint_to_hex(n: &BigUint) -> String {
    hex::encode(n.to_bytes_be())
}

pub fn biguint_from_hex(s: &str) -> Result<BigUint, HexError> {
    if s.is_empty() {
        return Err(HexError::Empty);
    }
    let bytes = decode(s)?;
    if bytes.len() > 1 && bytes[0] == 0 {
        return Err(HexError::NonMinimal);
    }
    Ok(BigUint::from_bytes_be(&bytes))
}

/// Serde adapter for big integers as minimal lowercase hex.
pub mod biguint {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&biguint_to_hex(n))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        biguint_from_hex(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter for byte strings as lowercase hex.
pub mod bytes {
    use super::*;

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        decode(&s).map_err(de::Error::custom)
    }
}
