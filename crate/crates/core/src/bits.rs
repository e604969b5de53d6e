//! Binary blocks interpreted MSB-first.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// An ordered sequence of bits. Bit 0 is the most significant bit when the
/// block is read as an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    /// Builds a block from 0/1 values. Any non-zero byte counts as a one.
    pub fn new(bits: Vec<u8>) -> Self {
        Self(bits.into_iter().map(|b| (b != 0) as u8).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// MSB-first integer value.
    pub fn to_biguint(&self) -> BigUint {
        if self.0.is_empty() {
            return BigUint::zero();
        }
        // Pack into big-endian bytes, left-padding to a byte boundary.
        let pad = (8 - self.0.len() % 8) % 8;
        let mut bytes = Vec::with_capacity((self.0.len() + pad) / 8);
        let mut acc = 0u8;
        let mut filled = pad;
        for &b in &self.0 {
            acc = (acc << 1) | b;
            filled += 1;
            if filled == 8 {
                bytes.push(acc);
                acc = 0;
                filled = 0;
            }
        }
        BigUint::from_bytes_be(&bytes)
    }

    /// Writes `value` into exactly `len` bits, MSB-first.
    pub fn from_biguint(value: &BigUint, len: usize) -> Result<Self> {
        if value.bits() > len as u64 {
            return Err(Error::OutOfRange("integer value for bit length"));
        }
        let mut out = vec![0u8; len];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = value.bit((len - 1 - i) as u64) as u8;
        }
        Ok(Self(out))
    }

    /// Concatenates `self` followed by `other`.
    pub fn concat(&self, other: &BitBlock) -> BitBlock {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitBlock(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitBlock {
        BitBlock(self.0[range].to_vec())
    }
}

impl From<Vec<bool>> for BitBlock {
    fn from(v: Vec<bool>) -> Self {
        Self(v.into_iter().map(u8::from).collect())
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for BitBlock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit block"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitBlock)
    }
}
