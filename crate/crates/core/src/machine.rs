//! Description machines: programs in, bitstrings out.
//!
//! A [`DescriptionMachine`] turns a program (itself a bitstring) into an
//! output bitstring, and the length of the shortest program producing a
//! string is that string's descriptive complexity relative to the machine.
//! All complexity statements in this crate are machine-relative; different
//! machines agree only up to an additive constant, and nothing here claims
//! universal Kolmogorov complexity.
//!
//! # Budget contract
//!
//! `decode` takes a budget in abstract work units and must uphold three
//! rules that the complexity search leans on:
//!
//! 1. Determinism: same program and budget, same result.
//! 2. Budget monotonicity: once a program yields an output at budget `T`, it
//!    yields the same output at every larger budget, and
//!    [`DecodeResult::Invalid`] is syntactic — it does not depend on the
//!    budget at all.
//! 3. For a **total** machine (`is_total`), the budget counts output bits
//!    exactly: a program returns [`DecodeResult::BudgetExhausted`] precisely
//!    when its output would exceed `budget` bits. Such a program can never
//!    decode to a string of length ≤ `budget`, so exhausted programs are
//!    safe to discard when searching under a budget of at least `|s|`, and
//!    budgeted complexity search is exact.
//!
//! A non-total machine may exhaust the budget on internal work instead;
//! searches then mark results that could still be undercut as inexact.

use crate::bits::BitString;
use crate::complexity::{complexity_by_enumeration, ComplexityValue};

/// Result of running a program: a machine never faults, it answers one of
/// three ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeResult {
    Output(BitString),
    /// The program is syntactically malformed (empty or truncated fields).
    Invalid,
    /// The output would exceed the budget's bit allowance.
    BudgetExhausted,
}

// Send + Sync so seed fan-outs can share one machine: decoding is pure and
// machines carry no mutable state.
pub trait DescriptionMachine: Send + Sync {
    /// Stable identifier, used in tables, CSV exports, and the wire protocol.
    fn id(&self) -> &str;

    /// True when every program halts regardless of budget; complexity
    /// relative to a total machine is exactly decidable.
    fn is_total(&self) -> bool;

    /// Runs `program` under the output-bit budget. See the module docs for
    /// the contract on `Invalid` vs `BudgetExhausted`.
    fn decode(&self, program: &BitString, budget: u64) -> DecodeResult;

    /// An inclusive program-length bound guaranteed to contain a witness for
    /// `s` (given budget ≥ `|s|`), if the machine offers one. Machines with a
    /// literal opcode return `|s| + 1`.
    fn literal_bound(&self, s: &BitString) -> Option<u64> {
        let _ = s;
        None
    }

    /// Length of the shortest program decoding to `s` within `budget`, or
    /// `None` when no witness is findable (budget below `|s|`, or no search
    /// bound available). The default searches every program up to
    /// [`literal_bound`](Self::literal_bound); machines may override with a
    /// direct inverter, and must return the same lengths where both apply.
    fn complexity(&self, s: &BitString, budget: u64) -> Option<ComplexityValue> {
        let cap = self.literal_bound(s)?;
        complexity_by_enumeration(self, s, budget, cap)
    }
}

/// The reference machine. Two opcodes:
///
/// ```text
/// 0 <payload>                      LIT: output the payload verbatim
/// 1 <1^ℓ 0> <block: ℓ bits> <count>  RLE: block repeated (count + 2) times
/// ```
///
/// The RLE block length ℓ is unary-coded (ℓ ones, then a zero) and must be
/// at least one; the count field is every remaining bit read as a binary
/// number, leading zeros allowed, and must be non-empty. Any empty or
/// truncated field makes the program invalid. Every program halts, so RM-1
/// complexity is exactly decidable — the machine trades universality for
/// testability.
///
/// Consequences worth knowing: `complexity` is at most `|s| + 1` (literal),
/// the shortest RLE program for a block of length ℓ is `2ℓ + 3` bits, and
/// RLE outputs are exactly the strings of the form `block^m` with `m ≥ 2` —
/// strings like `"10000"` that repeat no block are incompressible.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rm1;

impl Rm1 {
    pub const ID: &'static str = "rm1";
}

impl DescriptionMachine for Rm1 {
    fn id(&self) -> &str {
        Self::ID
    }

    fn is_total(&self) -> bool {
        true
    }

    fn decode(&self, program: &BitString, budget: u64) -> DecodeResult {
        let mut r = program.reader();
        let Some(opcode) = r.read_bit() else {
            return DecodeResult::Invalid; // no opcode bit
        };

        if !opcode {
            // LIT
            let payload = r.read_rest();
            if payload.len() as u64 > budget {
                return DecodeResult::BudgetExhausted;
            }
            return DecodeResult::Output(payload.iter().copied().collect());
        }

        // RLE
        let Some(block_len) = r.read_unary() else {
            return DecodeResult::Invalid; // unary field not terminated
        };
        if block_len == 0 {
            return DecodeResult::Invalid; // empty block field
        }
        let Some(block) = r.read_bits(block_len) else {
            return DecodeResult::Invalid; // truncated block
        };
        let count_field = r.read_rest();
        if count_field.is_empty() {
            return DecodeResult::Invalid; // empty count field
        }

        // The count field can be arbitrarily long, so size the output before
        // materializing anything: ℓ·(c+2) bits, checked against the budget
        // in unbounded arithmetic.
        let mut count = num_bigint::BigUint::ZERO;
        for &bit in count_field {
            count <<= 1u8;
            if bit {
                count += 1u8;
            }
        }
        let needed = (count + 2u8) * block_len;
        let Ok(needed) = u64::try_from(&needed) else {
            return DecodeResult::BudgetExhausted;
        };
        if needed > budget {
            return DecodeResult::BudgetExhausted;
        }

        let copies = needed / block_len as u64;
        let mut out = BitString::with_capacity(needed as usize);
        for _ in 0..copies {
            out.extend_from(&block);
        }
        DecodeResult::Output(out)
    }

    fn literal_bound(&self, s: &BitString) -> Option<u64> {
        Some(s.len() as u64 + 1)
    }

    /// Direct inverter: the only candidate programs for `s` are the literal
    /// (`|s| + 1` bits) and, for every block length that tiles `s` at least
    /// twice, the minimal RLE program (`2ℓ + 2 + max(1, bits(m − 2))` bits
    /// for `m` copies). Agrees with enumeration; see the tests.
    fn complexity(&self, s: &BitString, budget: u64) -> Option<ComplexityValue> {
        if (s.len() as u64) > budget {
            return None; // emitting s alone would exceed the budget
        }
        let mut best = s.len() as u64 + 1; // literal witness

        let n = s.len();
        for block_len in 1..=n / 2 {
            if !n.is_multiple_of(block_len) {
                continue;
            }
            let tiles = (0..n).all(|i| s.get(i) == s.get(i % block_len));
            if !tiles {
                continue;
            }
            let copies = (n / block_len) as u64;
            let count_bits = match copies - 2 {
                0 => 1, // a lone "0" is the shortest non-empty count field
                c => 64 - c.leading_zeros() as u64,
            };
            let rle = 1 + (block_len as u64 + 1) + block_len as u64 + count_bits;
            best = best.min(rle);
        }

        Some(ComplexityValue {
            bits: best,
            exact: true,
        })
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    const AMPLE: u64 = 1 << 20;

    #[test]
    fn empty_program_is_invalid() {
        assert_eq!(Rm1.decode(&BitString::new(), AMPLE), DecodeResult::Invalid);
    }

    #[test]
    fn literal_copies_payload() {
        assert_eq!(
            Rm1.decode(&bits("0101"), AMPLE),
            DecodeResult::Output(bits("101"))
        );
        assert_eq!(
            Rm1.decode(&bits("0"), AMPLE),
            DecodeResult::Output(BitString::new())
        );
    }

    #[test]
    fn rle_decodes_block_repeats() {
        // 1 | 10 | 0 | 1110 : block "0" repeated 14 + 2 = 16 times.
        assert_eq!(
            Rm1.decode(&bits("11001110"), AMPLE),
            DecodeResult::Output(BitString::repeat(false, 16))
        );
        // 1 | 10 | 0 | 1 : block "0", count 1 → three copies.
        assert_eq!(
            Rm1.decode(&bits("11001"), AMPLE),
            DecodeResult::Output(bits("000"))
        );
        // Leading zeros in the count field are allowed and change nothing.
        assert_eq!(
            Rm1.decode(&bits("1101001"), AMPLE),
            DecodeResult::Output(bits("111"))
        );
        assert_eq!(
            Rm1.decode(&bits("110101"), AMPLE),
            DecodeResult::Output(bits("111"))
        );
    }

    #[test]
    fn malformed_rle_fields_are_invalid() {
        // In order: unterminated unary (×3), zero block length (×2),
        // truncated block (×2), empty count field (×2).
        for p in [
            "1", "11", "111", "10", "101", "110", "1110", "1101", "111001",
        ] {
            assert_eq!(
                Rm1.decode(&bits(p), AMPLE),
                DecodeResult::Invalid,
                "program {p}"
            );
        }
    }

    #[test]
    fn budget_bounds_output_bits() {
        let p = bits("11001110"); // "0" × 16
        assert_eq!(Rm1.decode(&p, 15), DecodeResult::BudgetExhausted);
        assert_eq!(
            Rm1.decode(&p, 16),
            DecodeResult::Output(BitString::repeat(false, 16))
        );

        let lit = bits("0101");
        assert_eq!(Rm1.decode(&lit, 2), DecodeResult::BudgetExhausted);
        assert_eq!(Rm1.decode(&lit, 3), DecodeResult::Output(bits("101")));
    }

    #[test]
    fn oversized_count_fields_exhaust_without_overflow() {
        // 1 | 10 | 1 | 1^64 : count = 2^64 − 1, output would be ~2^64 bits.
        let mut p = bits("1101");
        for _ in 0..64 {
            p.push(true);
        }
        assert_eq!(Rm1.decode(&p, u64::MAX), DecodeResult::BudgetExhausted);
    }

    #[test]
    fn complexity_of_short_strings() {
        // Hand-enumerated: programs of length 1 output only "", length 2 only
        // "0"/"1", length 3 literals cover length-2 strings; no RLE program
        // shorter than 5 bits is valid.
        assert_eq!(
            Rm1.complexity(&bits(""), AMPLE),
            Some(ComplexityValue::exact(1))
        );
        assert_eq!(
            Rm1.complexity(&bits("0"), AMPLE),
            Some(ComplexityValue::exact(2))
        );
        assert_eq!(
            Rm1.complexity(&bits("1"), AMPLE),
            Some(ComplexityValue::exact(2))
        );
        assert_eq!(
            Rm1.complexity(&bits("10"), AMPLE),
            Some(ComplexityValue::exact(3))
        );
        assert_eq!(
            Rm1.complexity(&bits("101"), AMPLE),
            Some(ComplexityValue::exact(4))
        );
    }

    #[test]
    fn complexity_prefers_rle_on_long_runs() {
        // "0"^16: RLE with block "0" needs 1+2+1+4 = 8 bits, beating the
        // 17-bit literal and every longer-block tiling.
        let s = BitString::repeat(false, 16);
        assert_eq!(Rm1.complexity(&s, AMPLE), Some(ComplexityValue::exact(8)));

        // "0"^6 is a tie: block "0" costs 1+2+1+3 = 7 = |s|+1. Not compressible.
        let s = BitString::repeat(false, 6);
        assert_eq!(Rm1.complexity(&s, AMPLE), Some(ComplexityValue::exact(7)));

        // "101010" tiles as "10"^3: 1+3+2+1 = 7 = |s|+1, again a tie.
        assert_eq!(
            Rm1.complexity(&bits("101010"), AMPLE),
            Some(ComplexityValue::exact(7))
        );

        // "10101010" tiles as "10"^4, but four copies need a two-bit count:
        // 1+3+2+2 = 8 < 9. Still shorter than the literal, barely.
        assert_eq!(
            Rm1.complexity(&bits("10101010"), AMPLE),
            Some(ComplexityValue::exact(8))
        );
    }

    #[test]
    fn complexity_needs_budget_for_the_output() {
        assert_eq!(Rm1.complexity(&bits("101"), 2), None);
        assert_eq!(
            Rm1.complexity(&bits("101"), 3),
            Some(ComplexityValue::exact(4))
        );
        // The empty string costs nothing to emit.
        assert_eq!(
            Rm1.complexity(&bits(""), 0),
            Some(ComplexityValue::exact(1))
        );
    }

    #[test]
    fn literal_bound_holds() {
        for len in 0..=10u32 {
            for s in BitString::all_of_len(len) {
                let c = Rm1.complexity(&s, AMPLE).unwrap();
                assert!(
                    c.bits <= s.len() as u64 + 1,
                    "literal bound violated for {s}"
                );
                assert!(c.exact);
            }
        }
    }

    #[test]
    fn inverter_matches_enumeration_up_to_len_8() {
        for len in 0..=8u32 {
            for s in BitString::all_of_len(len) {
                let fast = Rm1.complexity(&s, AMPLE);
                let slow = complexity_by_enumeration(&Rm1, &s, AMPLE, s.len() as u64 + 1);
                assert_eq!(fast, slow, "oracle disagreement on {s}");
            }
        }
    }

    proptest! {
        #[test]
        fn inverter_matches_enumeration_on_random_strings(
            raw in prop::collection::vec(any::<bool>(), 0..=11)
        ) {
            let s: BitString = raw.into_iter().collect();
            let fast = Rm1.complexity(&s, AMPLE);
            let slow = complexity_by_enumeration(&Rm1, &s, AMPLE, s.len() as u64 + 1);
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn decode_is_budget_monotone(
            raw in prop::collection::vec(any::<bool>(), 1..=12),
            budget in 0u64..64,
        ) {
            let p: BitString = raw.into_iter().collect();
            if let DecodeResult::Output(out) = Rm1.decode(&p, budget) {
                prop_assert_eq!(Rm1.decode(&p, budget + 1), DecodeResult::Output(out.clone()));
                prop_assert_eq!(Rm1.decode(&p, u64::MAX), DecodeResult::Output(out));
            }
        }
    }
}
