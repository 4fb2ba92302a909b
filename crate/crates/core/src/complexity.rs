//! Descriptive complexity of bitstrings and labels.
//!
//! Everything here is relative to a [`DescriptionMachine`] and a budget. The
//! enumeration search in [`complexity_by_enumeration`] is the ground-truth
//! oracle: it tries every program in length order and works for any machine.
//! Machines may expose faster inverters through
//! [`DescriptionMachine::complexity`]; the test suites hold the two paths
//! equal wherever both apply.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::BitString;
use crate::label::Label;
use crate::machine::{DecodeResult, DescriptionMachine};
use crate::multiway::ObserverExperience;

/// A complexity measurement: shortest known program length in bits, plus
/// whether budget truncation could still hide a shorter witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityValue {
    pub bits: u64,
    pub exact: bool,
}

impl ComplexityValue {
    pub fn exact(bits: u64) -> Self {
        ComplexityValue { bits, exact: true }
    }
}

/// Shortest program (searching lengths `0..=max_len`) whose decode equals
/// `s` under `budget`, or `None` if the search finds nothing.
///
/// Exactness: for a total machine the budget contract (see
/// [`crate::machine`]) guarantees an exhausted program can never be a
/// witness, so any hit is the true minimum. For a non-total machine a
/// strictly shorter program that ran out of budget might still decode to `s`
/// at some larger budget, and the result is marked inexact when that
/// possibility is open.
///
/// Panics if `max_len > 63`; exhaustive search beyond that is infeasible and
/// asking for it is a caller bug.
pub fn complexity_by_enumeration<M>(
    machine: &M,
    s: &BitString,
    budget: u64,
    max_len: u64,
) -> Option<ComplexityValue>
where
    M: DescriptionMachine + ?Sized,
{
    assert!(
        max_len <= 63,
        "program enumeration beyond 63-bit programs is infeasible"
    );
    let mut exhausted_shorter = false;
    for len in 0..=max_len as u32 {
        let mut exhausted_here = false;
        for program in BitString::all_of_len(len) {
            match machine.decode(&program, budget) {
                DecodeResult::Output(out) if out == *s => {
                    let exact = machine.is_total() || !exhausted_shorter;
                    return Some(ComplexityValue {
                        bits: len as u64,
                        exact,
                    });
                }
                DecodeResult::BudgetExhausted => exhausted_here = true,
                _ => {}
            }
        }
        exhausted_shorter |= exhausted_here;
    }
    None
}

/// Compressibility is undefined for the label 0: a no-leading-zero positional
/// representation of 0 has no digits.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("compressibility is undefined for the label 0")]
pub struct ZeroUndefined;

/// Whether the base-2^r representation of `x` admits a strictly shorter
/// program, i.e. `complexity(repr) < |repr|`. Requires `r ≥ 1` (the
/// representation needs at least one bit per digit) and `x ≥ 1`.
///
/// A `None` from the machine (budget below the representation length) counts
/// as not compressible at this budget.
pub fn is_compressible<M>(
    machine: &M,
    x: &Label,
    r: u32,
    budget: u64,
) -> Result<bool, ZeroUndefined>
where
    M: DescriptionMachine + ?Sized,
{
    if x.is_zero() {
        return Err(ZeroUndefined);
    }
    let repr = x.repr_bits(r);
    Ok(match machine.complexity(&repr, budget) {
        Some(c) => c.bits < repr.len() as u64,
        None => false,
    })
}

/// One step of a complexity profile: step number `n` (1-based, `n = 1` is
/// the start state), the bit length of the state's representation, and its
/// complexity (`None` when the budget cannot reach the string).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfileRow {
    pub n: u64,
    pub label_bits: u64,
    pub value: Option<ComplexityValue>,
}

/// Per-step complexity along an observer's path, ready for growth fitting.
/// States are rendered in base 2^r for the experience's arity exponent r
/// (base 2 when r = 0, where the digit grouping degenerates).
pub fn complexity_profile<M>(
    machine: &M,
    experience: &ObserverExperience,
    budget: u64,
) -> Vec<ProfileRow>
where
    M: DescriptionMachine + ?Sized,
{
    let r = experience.arity_exponent().max(1);
    experience
        .states()
        .iter()
        .enumerate()
        .map(|(i, state)| {
            let repr = state.repr_bits(r);
            ProfileRow {
                n: i as u64 + 1,
                label_bits: repr.len() as u64,
                value: machine.complexity(&repr, budget),
            }
        })
        .collect()
}

/// How a [`ComplexityTable`] was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMethod {
    /// Per-string queries through the machine's own inverter.
    Inversion,
    /// Decode of every program below a length cutoff, minimized per output.
    Enumeration,
}

impl TableMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TableMethod::Inversion => "inversion",
            TableMethod::Enumeration => "enumeration",
        }
    }
}

/// A cache of complexity values for repeated queries, built once and then
/// read-only.
#[derive(Clone, Debug)]
pub struct ComplexityTable {
    machine_id: String,
    budget: u64,
    method: TableMethod,
    entries: BTreeMap<BitString, ComplexityValue>,
}

impl ComplexityTable {
    /// Decodes every program of length < `max_program_len` and records the
    /// minimum program length per output string. Any string whose true
    /// witness is shorter than `max_program_len` gets its exact complexity;
    /// strings without such a witness are simply absent.
    pub fn by_enumeration<M>(machine: &M, budget: u64, max_program_len: u32) -> Self
    where
        M: DescriptionMachine + ?Sized,
    {
        assert!(
            max_program_len <= 63,
            "program enumeration beyond 63-bit programs is infeasible"
        );
        let mut entries: BTreeMap<BitString, ComplexityValue> = BTreeMap::new();
        let mut exhausted_shorter = false;
        for len in 0..max_program_len {
            let mut exhausted_here = false;
            for program in BitString::all_of_len(len) {
                match machine.decode(&program, budget) {
                    DecodeResult::Output(out) => {
                        let exact = machine.is_total() || !exhausted_shorter;
                        entries.entry(out).or_insert(ComplexityValue {
                            bits: len as u64,
                            exact,
                        });
                    }
                    DecodeResult::BudgetExhausted => exhausted_here = true,
                    DecodeResult::Invalid => {}
                }
            }
            exhausted_shorter |= exhausted_here;
        }
        ComplexityTable {
            machine_id: machine.id().to_string(),
            budget,
            method: TableMethod::Enumeration,
            entries,
        }
    }

    /// Queries the machine's inverter for each given string; strings the
    /// machine cannot answer under the budget are absent.
    pub fn by_inversion<M>(
        machine: &M,
        strings: impl IntoIterator<Item = BitString>,
        budget: u64,
    ) -> Self
    where
        M: DescriptionMachine + ?Sized,
    {
        let mut entries = BTreeMap::new();
        for s in strings {
            if let Some(value) = machine.complexity(&s, budget) {
                entries.insert(s, value);
            }
        }
        ComplexityTable {
            machine_id: machine.id().to_string(),
            budget,
            method: TableMethod::Inversion,
            entries,
        }
    }

    pub fn machine_id(&self) -> &str {
        &self.machine_id
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn method(&self) -> TableMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &BitString) -> Option<ComplexityValue> {
        self.entries.get(s).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BitString, ComplexityValue)> {
        self.entries.iter().map(|(s, v)| (s, *v))
    }

    /// The sub-table of strings no longer than `max_len` bits. Enumeration
    /// records every output it encounters, including long expansions; this
    /// trims the table to a length range it covers completely.
    pub fn restricted(&self, max_len: u32) -> ComplexityTable {
        ComplexityTable {
            machine_id: self.machine_id.clone(),
            budget: self.budget,
            method: self.method,
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| s.len() <= max_len as usize)
                .map(|(s, v)| (s.clone(), *v))
                .collect(),
        }
    }

    /// CSV export, rows in shortlex order (length, then lexicographic), so
    /// repeated exports are byte-identical.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<&BitString> = self.entries.keys().collect();
        rows.sort_by_key(|s| (s.len(), *s));
        let mut out = String::from("string,bits,len,exact,machine,budget\n");
        for s in rows {
            let v = self.entries[s];
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s,
                v.bits,
                s.len(),
                v.exact,
                self.machine_id,
                self.budget
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}
