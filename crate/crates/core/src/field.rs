//! The prime field F_q.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("q = {0} is not a prime")]
    NotPrime(u64),
    #[error("q = {0} is too large (maximum supported prime is {max})", max = FieldSpec::MAX_Q)]
    TooLarge(u64),
}

/// The coefficient field F_q for a prime q.
///
/// Elements are plain `u32` values in `0..q`. All arithmetic goes through the
/// field so that values never leave the canonical range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldSpec {
    q: u32,
}

impl FieldSpec {
    /// Largest accepted q; keeps every product of two elements inside `u64`.
    pub const MAX_Q: u64 = (1 << 31) - 1;

    pub fn new(q: u64) -> Result<Self, FieldError> {
        if q > Self::MAX_Q {
            return Err(FieldError::TooLarge(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(Self { q: q as u32 })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Reduce an arbitrary integer into `0..q`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse via Fermat's little theorem. Returns `None` for 0.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.q) {
            return None;
        }
        Some(self.pow(a, self.q as u64 - 2))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let m = self.q as u64;
        let mut base = a as u64 % m;
        let mut acc = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u32
    }

    /// `(-1)^n` as a field element.
    pub fn sign(&self, n: usize) -> u32 {
        if n.is_multiple_of(2) {
            1 % self.q
        } else {
            self.neg(1)
        }
    }
}

impl TryFrom<u64> for FieldSpec {
    type Error = FieldError;

    fn try_from(q: u64) -> Result<Self, Self::Error> {
        Self::new(q)
    }
}

impl From<FieldSpec> for u64 {
    fn from(f: FieldSpec) -> u64 {
        f.q as u64
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
