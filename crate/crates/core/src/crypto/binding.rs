//! Identity binding: the link between a holder's civil identity and the
//! certificate, in one of three privacy levels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::hash::{hash_digest, DIGEST_LEN};
use crate::canonical::to_canonical;
use crate::hexfmt;

/// Civil identity fields keyed by field name.
pub type CivilIdentity = BTreeMap<String, String>;

pub const REQUIRED_FIELDS: [&str; 4] = ["name", "surname", "doc", "dob"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BindingMechanism {
    PartialInfo,
    FullInfo,
    HashedInfo,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingData {
    pub mechanism: BindingMechanism,
    #[serde(with = "hexfmt::bytes")]
    pub payload: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BindingError {
    #[error("civil identity lacks required field `{0}`")]
    MissingField(&'static str),
    #[error("civil identity field `{0}` is empty")]
    EmptyField(&'static str),
}

impl BindingData {
    /// Structural validity: hashed payloads must be exactly one digest long.
    pub fn is_well_formed(&self) -> bool {
        match self.mechanism {
            BindingMechanism::HashedInfo => self.payload.len() == DIGEST_LEN,
            _ => !self.payload.is_empty(),
        }
    }
}

fn field<'a>(identity: &'a CivilIdentity, name: &'static str) -> Result<&'a str, BindingError> {
    let v = identity.get(name).ok_or(BindingError::MissingField(name))?;
    if v.trim().is_empty() {
        return Err(BindingError::EmptyField(name));
    }
    Ok(v)
}

fn initial(s: &str) -> impl Iterator<Item = char> + '_ {
    s.trim().chars().take(1).flat_map(char::to_uppercase)
}

pub fn bind_identity(identity: &CivilIdentity, mechanism: BindingMechanism) -> Result<BindingData, BindingError> {
    for name in REQUIRED_FIELDS {
        field(identity, name)?;
    }
    let payload = match mechanism {
        BindingMechanism::PartialInfo => {
            let name = field(identity, "name")?;
            let surname = field(identity, "surname")?;
            let doc = field(identity, "doc")?;
            let dob = field(identity, "dob")?;
            let tail_start = doc.char_indices().rev().nth(3).map(|(i, _)| i).unwrap_or(0);
            let mut out = String::new();
            out.extend(initial(name));
            out.extend(initial(surname));
            out.push('|');
            out.push_str(&doc[tail_start..]);
            out.push('|');
            out.push_str(dob);
            out.into_bytes()
        }
        BindingMechanism::FullInfo => to_canonical(identity).into_bytes(),
        BindingMechanism::HashedInfo => hash_digest(to_canonical(identity).as_bytes()).0.to_vec(),
    };
    Ok(BindingData { mechanism, payload })
}
