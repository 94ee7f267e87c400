use alloc::vec::Vec;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::CryptoError;
use crate::hexfmt;

const MODP_2048_P: &str = "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7edee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf0598da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3be39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf6955817183995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff";

const FAST_256_P: &str = "c00000000000000000000000000000000000000000000000000000000000a0eb";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(with = "hexfmt::biguint")]
    p: BigUint,
    #[serde(with = "hexfmt::biguint")]
    q: BigUint,
    #[serde(with = "hexfmt::biguint")]
    g: BigUint,
}

/// Order-`q` subgroup of the integers mod `p`, generated by `g`.
///
/// Values of this type always satisfy `q | p - 1`, `g^q = 1 (mod p)` and
/// `g != 1`; construction checks these.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    element_len: usize,
}

impl TryFrom<RawParams> for GroupParams {
    type Error = CryptoError;
    fn try_from(raw: RawParams) -> Result<Self, CryptoError> {
        GroupParams::new(raw.p, raw.q, raw.g)
    }
}

impl From<GroupParams> for RawParams {
    fn from(g: GroupParams) -> Self {
        RawParams { p: g.p, q: g.q, g: g.g }
    }
}

impl GroupParams {
    pub fn new(p: BigUint, q: BigUint, g: BigUint) -> Result<Self, CryptoError> {
        let one = BigUint::one();
        if p <= BigUint::from(3u8) || q <= one {
            return Err(CryptoError::InvalidParams("modulus or order too small"));
        }
        if !(&p - &one).is_multiple_of(&q) {
            return Err(CryptoError::InvalidParams("q does not divide p - 1"));
        }
        if g <= one || g >= p {
            return Err(CryptoError::InvalidParams("generator out of range"));
        }
        if g.modpow(&q, &p) != one {
            return Err(CryptoError::InvalidParams("generator order does not divide q"));
        }
        let element_len = p.to_bytes_be().len();
        Ok(GroupParams { p, q, g, element_len })
    }

    /// Toy group for exhaustive checks: p = 23, q = 11, g = 2.
    pub fn test() -> Self {
        GroupParams::new(23u32.into(), 11u32.into(), 2u32.into()).expect("valid test group")
    }

    /// 256-bit safe-prime group (p = 2q + 1, g = 4). Cryptographically
    /// sized challenge space with cheap arithmetic, for simulations and
    /// soundness fuzzing.
    pub fn fast() -> Self {
        let p = hexfmt::biguint_from_hex(FAST_256_P).expect("valid constant");
        let q = (&p - 1u32) >> 1;
        GroupParams::new(p, q, 4u32.into()).expect("valid fast group")
    }

    /// 2048-bit safe-prime MODP group with generator 2 (RFC 3526 group 14).
    pub fn modp2048() -> Self {
        let p = hexfmt::biguint_from_hex(MODP_2048_P).expect("valid constant");
        let q = (&p - 1u32) >> 1;
        GroupParams::new(p, q, 2u32.into()).expect("valid modp group")
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    /// Byte width of a fixed-width element encoding.
    pub fn element_len(&self) -> usize {
        self.element_len
    }

    /// `g^e mod p`.
    pub fn pow_g(&self, e: &BigUint) -> BigUint {
        self.g.modpow(e, &self.p)
    }

    pub fn pow(&self, base: &BigUint, e: &BigUint) -> BigUint {
        base.modpow(e, &self.p)
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }

    /// Membership in the order-`q` subgroup.
    pub fn is_element(&self, x: &BigUint) -> bool {
        !x.is_zero() && x < &self.p && x.modpow(&self.q, &self.p).is_one()
    }

    pub fn is_scalar(&self, x: &BigUint) -> bool {
        x < &self.q
    }

    /// Big-endian encoding left-padded to [`element_len`](Self::element_len).
    pub fn encode_element(&self, x: &BigUint) -> Vec<u8> {
        let bytes = x.to_bytes_be();
        let mut out = Vec::with_capacity(self.element_len.max(bytes.len()));
        out.resize(self.element_len.saturating_sub(bytes.len()), 0);
        out.extend_from_slice(&bytes);
        out
    }

    /// Uniform scalar in `[1, q - 1]`.
    pub fn random_nonzero_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        let mut rng = RngAdapter(rng);
        rng.gen_biguint_range(&BigUint::one(), &self.q)
    }

    /// Uniform scalar in `[0, q - 1]`.
    pub fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        let mut rng = RngAdapter(rng);
        rng.gen_biguint_below(&self.q)
    }

    /// Inverse mod the prime `q` by Fermat's little theorem.
    pub fn scalar_inverse(&self, x: &BigUint) -> Option<BigUint> {
        let x = x % &self.q;
        if x.is_zero() {
            return None;
        }
        Some(x.modpow(&(&self.q - 2u32), &self.q))
    }
}

// Lets `?Sized` generators (e.g. `&mut dyn RngCore`) reach `RandBigInt`.
struct RngAdapter<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}
