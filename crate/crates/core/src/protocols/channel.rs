use alloc::collections::{BTreeSet, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::Presentation;
use crate::crypto::{BindingData, PublicKey};
use crate::primitives::Address;

/// Everything parties say to each other during a protocol run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Key(PublicKey),
    Application(super::Application),
    Commitment(BigUint),
    Challenge(BigUint),
    Response(BigUint),
    Binding(BindingData),
    Presentation(Presentation),
    CertificateAddress(Address),
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Key(_) => "Key",
            Message::Application(_) => "Application",
            Message::Commitment(_) => "Commitment",
            Message::Challenge(_) => "Challenge",
            Message::Response(_) => "Response",
            Message::Binding(_) => "Binding",
            Message::Presentation(_) => "Presentation",
            Message::CertificateAddress(_) => "CertificateAddress",
        }
    }
}

/// Faults keyed by the global sequence number of a sent message.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Faults {
    #[serde(default)]
    pub drop: BTreeSet<u64>,
    /// Held back and delivered after the next message.
    #[serde(default)]
    pub delay: BTreeSet<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChannelError {
    #[error("no message arrived")]
    Empty,
    #[error("expected {expected}, received {got}")]
    Unexpected { expected: &'static str, got: &'static str },
}

/// In-process, in-order message channel with an optional fault injector.
#[derive(Clone, Debug, Default)]
pub struct Channel {
    queue: VecDeque<Message>,
    held: Option<Message>,
    sent: u64,
    pub faults: Faults,
}

impl Channel {
    pub fn new(faults: Faults) -> Self {
        Channel { faults, ..Default::default() }
    }

    /// Messages sent so far, including dropped ones.
    pub fn sent(&self) -> u64 {
        self.sent
    }

    /// Discards anything left over from an earlier session.
    pub fn reset(&mut self) {
        self.queue.clear();
        self.held = None;
    }

    pub fn send(&mut self, msg: Message) {
        let seq = self.sent;
        self.sent += 1;
        if self.faults.drop.contains(&seq) {
            return;
        }
        let held = self.held.take();
        if self.faults.delay.contains(&seq) {
            self.held = Some(msg);
        } else {
            self.queue.push_back(msg);
        }
        if let Some(h) = held {
            self.queue.push_back(h);
        }
    }

    pub fn recv(&mut self) -> Result<Message, ChannelError> {
        self.queue.pop_front().ok_or(ChannelError::Empty)
    }
}

macro_rules! expect_msg {
    ($chan:expr, $variant:ident) => {
        match $chan.recv()? {
            $crate::protocols::Message::$variant(v) => v,
            other => {
                return Err($crate::protocols::ChannelError::Unexpected {
                    expected: stringify!($variant),
                    got: other.kind(),
                }
                .into())
            }
        }
    };
}
pub(crate) use expect_msg;
