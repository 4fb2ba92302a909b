//! State labels: arbitrary-precision naturals with positional renderings.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitString;

/// The label of a state: a natural number.
///
/// Rendered positionally in base 2^r, labels carry no leading zero digit
/// (zero itself is the single digit 0).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Label(BigUint);

impl Label {
    pub fn new(value: BigUint) -> Self {
        Label(value)
    }

    pub fn zero() -> Self {
        Label(BigUint::zero())
    }

    pub fn one() -> Self {
        Label(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Number of binary digits; 1 for zero.
    pub fn bit_len(&self) -> u64 {
        if self.0.is_zero() {
            1
        } else {
            self.0.bits()
        }
    }

    /// Number of digits in base 2^r (no leading zero digit; zero has one digit).
    ///
    /// A label x >= 1 has d digits exactly when 2^(r(d-1)) <= x < 2^(rd),
    /// so d = ceil(bits(x) / r).
    pub fn digit_len(&self, r: u32) -> u64 {
        assert!(r >= 1, "digit length needs base 2^r with r >= 1");
        if self.0.is_zero() {
            1
        } else {
            self.0.bits().div_ceil(r as u64)
        }
    }

    /// The base-2^r digit string rendered as r bits per digit, most
    /// significant digit first.
    ///
    /// Equivalently: the binary expansion left-padded with zeros to a
    /// multiple of r bits. The leading digit is nonzero by construction.
    pub fn repr_bits(&self, r: u32) -> BitString {
        assert!(r >= 1, "representation needs base 2^r with r >= 1");
        let digits = self.digit_len(r);
        let width = digits * r as u64;
        let bin = self.0.to_radix_be(2);
        let mut out = BitString::with_capacity(width as usize);
        if self.0.is_zero() {
            return BitString::repeat(false, width as usize);
        }
        for _ in 0..width - bin.len() as u64 {
            out.push(false);
        }
        for d in bin {
            out.push(d == 1);
        }
        out
    }

    /// Minimal big-endian byte encoding: no leading zero bytes, zero is empty.
    pub fn to_min_bytes_be(&self) -> Vec<u8> {
        if self.0.is_zero() {
            Vec::new()
        } else {
            self.0.to_bytes_be()
        }
    }

    pub fn from_bytes_be(bytes: &[u8]) -> Self {
        Label(BigUint::from_bytes_be(bytes))
    }
}

impl From<u64> for Label {
    fn from(v: u64) -> Self {
        Label(BigUint::from(v))
    }
}

impl From<BigUint> for Label {
    fn from(v: BigUint) -> Self {
        Label(v)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(v: u64) -> Label {
        Label::from(v)
    }

    #[test]
    fn bit_len_counts_binary_digits() {
        assert_eq!(lab(0).bit_len(), 1);
        assert_eq!(lab(1).bit_len(), 1);
        assert_eq!(lab(2).bit_len(), 2);
        assert_eq!(lab(255).bit_len(), 8);
        assert_eq!(lab(256).bit_len(), 9);
    }

    #[test]
    fn digit_len_in_power_of_two_bases() {
        assert_eq!(lab(0).digit_len(1), 1);
        assert_eq!(lab(1).digit_len(1), 1);
        assert_eq!(lab(5).digit_len(1), 3);
        // 5 = "11" in base 4, 15 = "33", 16 = "100"
        assert_eq!(lab(5).digit_len(2), 2);
        assert_eq!(lab(15).digit_len(2), 2);
        assert_eq!(lab(16).digit_len(2), 3);
    }

    #[test]
    fn repr_bits_pads_digits_to_r_bits() {
        assert_eq!(lab(5).repr_bits(1).to_string(), "101");
        assert_eq!(lab(5).repr_bits(2).to_string(), "0101");
        assert_eq!(lab(1).repr_bits(3).to_string(), "001");
        assert_eq!(lab(0).repr_bits(2).to_string(), "00");
        // 2^20 renders as "1" followed by twenty zeros in binary
        let big = Label::new(BigUint::from(1u32) << 20);
        let s = big.repr_bits(1).to_string();
        assert!(s.starts_with('1'));
        assert_eq!(s.len(), 21);
        assert!(s[1..].bytes().all(|b| b == b'0'));
    }

    #[test]
    fn repr_leading_digit_is_nonzero() {
        for v in 1u64..200 {
            for r in 1..=4u32 {
                let s = lab(v).repr_bits(r);
                assert_eq!(s.len() as u64, lab(v).digit_len(r) * r as u64);
                let lead: String = s
                    .iter()
                    .take(r as usize)
                    .map(|b| if b { '1' } else { '0' })
                    .collect();
                assert!(
                    lead.contains('1'),
                    "leading digit of {v} base 2^{r} is zero"
                );
            }
        }
    }

    #[test]
    fn min_bytes_round_trip() {
        assert_eq!(lab(0).to_min_bytes_be(), Vec::<u8>::new());
        assert_eq!(lab(1).to_min_bytes_be(), vec![1]);
        assert_eq!(lab(256).to_min_bytes_be(), vec![1, 0]);
        for v in [0u64, 1, 255, 256, 65535, 1 << 40] {
            assert_eq!(Label::from_bytes_be(&lab(v).to_min_bytes_be()), lab(v));
        }
    }
}
