//! Bitstrings and a sequential bit reader.
//!
//! Programs and machine outputs are finite bit sequences. Scales here are
//! small (program enumeration stays below ~2^21 strings), so bits are stored
//! one per byte for simplicity.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A finite sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid bit character {found:?} at offset {offset}")]
pub struct ParseBitsError {
    pub offset: usize,
    pub found: char,
}

impl BitString {
    pub fn new() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        BitString {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// The `width` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: u32) -> Self {
        assert!(width <= 64, "width out of range");
        let mut bits = Vec::with_capacity(width as usize);
        for i in (0..width).rev() {
            bits.push(value >> i & 1 == 1);
        }
        BitString { bits }
    }

    /// `n` copies of `bit`.
    pub fn repeat(bit: bool, n: usize) -> Self {
        BitString { bits: vec![bit; n] }
    }

    /// All bitstrings of length `len` in ascending numeric order.
    ///
    /// Panics if `len > 63`; exhaustive enumeration beyond that is not a
    /// realistic workload.
    pub fn all_of_len(len: u32) -> impl Iterator<Item = BitString> {
        assert!(len <= 63, "enumeration length out of range");
        (0u64..1 << len).map(move |v| BitString::from_u64(v, len))
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { src: self, pos: 0 }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for (offset, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                found => return Err(ParseBitsError { offset, found }),
            }
        }
        Ok(BitString { bits })
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString {
            bits: iter.into_iter().collect(),
        }
    }
}

/// Cursor that consumes a [`BitString`] front to back.
pub struct BitReader<'a> {
    src: &'a BitString,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn read_bit(&mut self) -> Option<bool> {
        let bit = self.src.get(self.pos)?;
        self.pos += 1;
        Some(bit)
    }

    /// Count of consecutive ones up to and including a terminating zero.
    /// `None` if the stream ends before the zero.
    pub fn read_unary(&mut self) -> Option<usize> {
        let mut count = 0;
        loop {
            match self.read_bit()? {
                true => count += 1,
                false => return Some(count),
            }
        }
    }

    /// The next `n` bits as a [`BitString`]; `None` if fewer remain.
    pub fn read_bits(&mut self, n: usize) -> Option<BitString> {
        if self.remaining() < n {
            return None;
        }
        let out = BitString {
            bits: self.src.bits[self.pos..self.pos + n].to_vec(),
        };
        self.pos += n;
        Some(out)
    }

    /// Consumes the rest of the stream, returned as a slice of bits.
    pub fn read_rest(&mut self) -> &'a [bool] {
        let rest = &self.src.bits[self.pos..];
        self.pos = self.src.len();
        rest
    }

    pub fn remaining(&self) -> usize {
        self.src.len() - self.pos
    }
}
