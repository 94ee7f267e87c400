//! Discrete-log group arithmetic, keys, Schnorr identification and
//! signatures, hashing, and identity binding.

mod binding;
mod group;
mod hash;
mod keys;
pub mod schnorr;
mod signature;

pub use binding::{bind_identity, BindingData, BindingError, BindingMechanism, CivilIdentity, REQUIRED_FIELDS};
pub use group::GroupParams;
pub use hash::{hash_digest, hash_parts, hash_to_scalar, Digest, DIGEST_LEN};
pub use keys::{keygen, KeyPair, PublicKey, SecretKey};
pub use signature::{sign, sign_with_nonce, verify, Signature};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("invalid group parameters: {0}")]
    InvalidParams(&'static str),
    #[error("secret key must lie in [1, q-1]")]
    SecretOutOfRange,
    #[error("nonce must lie in [1, q-1]")]
    NonceOutOfRange,
}
