#![no_std]
extern crate alloc;

pub mod analytics;
pub mod canonical;
pub mod contracts;
pub mod crypto;
pub mod hexfmt;
pub mod ledger;
pub mod primitives;
pub mod protocols;
