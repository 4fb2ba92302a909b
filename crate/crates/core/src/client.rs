//! The receiving end of the stream: keep a state iff its index is a
//! progression element.
//!
//! The server enumerates ontic states 1, 2, 3, …; the client computes the
//! incompressibility progression for itself and accepts the n-th state
//! exactly when n is the smallest number of its digit length (base 2^r)
//! that does not compress. Acceptance is a predicate on the *index*; the
//! label rides along as payload. Nothing in the protocol asserts
//! compressibility — the client trusts only its own machine and budget, so
//! "budget disagreement" with the server cannot arise.

use std::collections::BTreeMap;
use std::io::Read;

use crate::chaitin::chaitin_element;
use crate::frame::{read_frame, Frame, ProtocolError};
use crate::label::Label;
use crate::machine::DescriptionMachine;

/// One accepted ontic state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptedState {
    /// Server index n.
    pub index: u64,
    /// Digit length of n in base 2^r.
    pub digits: u32,
    /// The state's label, as sent.
    pub label: Label,
}

/// Whether the stream reached its END frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamStatus {
    Complete,
    /// The connection closed cleanly between frames but before END. The
    /// history up to that point is valid; the flag records the early stop.
    Truncated,
}

/// Everything the client retains from one session: the accepted states (its
/// history of the universe) plus the parameters that determined acceptance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClientHistory {
    pub rule_name: String,
    pub arity_exponent: u32,
    pub machine_id: String,
    pub budget: u64,
    /// Total STATE frames observed (server time elapsed).
    pub states_seen: u64,
    /// Strictly increasing in index; at most one entry per digit length.
    pub accepted: Vec<AcceptedState>,
    pub status: StreamStatus,
}

impl ClientHistory {
    pub fn csv_header() -> &'static str {
        "m,index,l,label,machine,budget"
    }

    /// One row per accepted state, m counting from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for (m, state) in self.accepted.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                m + 1,
                state.index,
                state.digits,
                state.label,
                self.machine_id,
                self.budget
            ));
        }
        out
    }
}

/// Digit count of n ≥ 1 in the given base ≥ 2 — the coarse "hour" a
/// length-only observer can read off a counter. Perceived time grows with
/// the logarithm of server time.
///
/// Panics on n = 0 (zero has no positional representation here) or base < 2.
pub fn perceived_time(n: u64, base: u64) -> u32 {
    assert!(n >= 1, "perceived time is defined for n >= 1");
    assert!(base >= 2, "positional digit counts need base >= 2");
    let mut x = n;
    let mut digits = 0;
    while x > 0 {
        x /= base;
        digits += 1;
    }
    digits
}

fn index_digits(n: u64, r: u32) -> u32 {
    debug_assert!(n >= 1 && r >= 1);
    let bits = 64 - n.leading_zeros();
    bits.div_ceil(r)
}

/// Shared acceptance predicate: is n the progression element for its own
/// digit length? The per-length elements are cached across the session.
fn accepts<M>(
    machine: &M,
    budget: u64,
    r: u32,
    cache: &mut BTreeMap<u32, Option<Label>>,
    index: u64,
) -> (u32, bool)
where
    M: DescriptionMachine + ?Sized,
{
    let digits = index_digits(index, r);
    let element = cache
        .entry(digits)
        .or_insert_with(|| chaitin_element(machine, r, digits, budget));
    (digits, element.as_ref() == Some(&Label::from(index)))
}

/// Reads a framed stream and keeps exactly the states at progression
/// indices.
///
/// The first frame must be HELLO (r is taken from it; r = 0 is rejected —
/// a 1-regular stream has no progression to filter by). STATE indices must
/// run 1, 2, 3, … without gaps; protocol errors name the 0-based frame
/// ordinal, HELLO being frame 0. An END frame completes the history; clean
/// EOF before END yields a truncated-but-valid one. The progression is
/// computed lazily per digit length and cached for the session.
pub fn client_filter<R, M>(
    reader: &mut R,
    machine: &M,
    budget: u64,
) -> Result<ClientHistory, ProtocolError>
where
    R: Read,
    M: DescriptionMachine + ?Sized,
{
    let (rule_name, r) = match read_frame(reader, 0)? {
        Some(Frame::Hello {
            arity_exponent,
            rule_name,
            ..
        }) => {
            if arity_exponent == 0 {
                return Err(ProtocolError::ZeroArity);
            }
            (rule_name, arity_exponent as u32)
        }
        Some(_) => return Err(ProtocolError::ExpectedHello { frame: 0 }),
        None => return Err(ProtocolError::Truncated { frame: 0 }),
    };

    let mut history = ClientHistory {
        rule_name,
        arity_exponent: r,
        machine_id: machine.id().to_string(),
        budget,
        states_seen: 0,
        accepted: Vec::new(),
        status: StreamStatus::Truncated,
    };
    let mut elements: BTreeMap<u32, Option<Label>> = BTreeMap::new();
    let mut ordinal: u64 = 1;
    let mut expected: u64 = 1;

    // A clean EOF before END leaves the history truncated but valid.
    while let Some(frame) = read_frame(reader, ordinal)? {
        match frame {
            Frame::State { index, label } => {
                if index != expected {
                    return Err(ProtocolError::IndexGap {
                        frame: ordinal,
                        expected,
                        got: index,
                    });
                }
                expected += 1;
                history.states_seen += 1;

                let (digits, keep) = accepts(machine, budget, r, &mut elements, index);
                if keep {
                    history.accepted.push(AcceptedState {
                        index,
                        digits,
                        label,
                    });
                }
            }
            Frame::End => {
                history.status = StreamStatus::Complete;
                break;
            }
            Frame::Error { message } => {
                return Err(ProtocolError::ServerError {
                    frame: ordinal,
                    message,
                });
            }
            Frame::Hello { .. } => {
                return Err(ProtocolError::MalformedHello {
                    frame: ordinal,
                    reason: "duplicate HELLO",
                });
            }
        }
        ordinal += 1;
    }

    Ok(history)
}

/// The frameless transport: runs the enumeration and the filter in one
/// process, no bytes in between.
///
/// Produces exactly what [`client_filter`] would produce from a served
/// byte stream of the same (rule, root, count) — including errors: a rule
/// failure surfaces as the same [`ProtocolError::ServerError`] (same frame
/// ordinal, same message) the wire client would have decoded from the
/// server's ERROR frame, and r = 0 is rejected as on the wire. This is the
/// function transport-equivalence tests compare against.
pub fn in_process_history<M>(
    rule: &crate::rule::RuleSystem,
    root: Label,
    count: u64,
    machine: &M,
    budget: u64,
) -> Result<ClientHistory, ProtocolError>
where
    M: DescriptionMachine + ?Sized,
{
    let r = rule.arity_exponent();
    if r == 0 {
        return Err(ProtocolError::ZeroArity);
    }

    let mut history = ClientHistory {
        rule_name: rule.name().to_string(),
        arity_exponent: r,
        machine_id: machine.id().to_string(),
        budget,
        states_seen: 0,
        accepted: Vec::new(),
        status: StreamStatus::Complete,
    };
    let mut elements: BTreeMap<u32, Option<Label>> = BTreeMap::new();

    for item in crate::multiway::BfsEnumerator::new(rule, root, count) {
        match item {
            Ok((index, label)) => {
                history.states_seen += 1;
                let (digits, keep) = accepts(machine, budget, r, &mut elements, index);
                if keep {
                    history.accepted.push(AcceptedState {
                        index,
                        digits,
                        label,
                    });
                }
            }
            Err(rule_err) => {
                return Err(ProtocolError::ServerError {
                    frame: history.states_seen + 1,
                    message: rule_err.to_string(),
                });
            }
        }
    }
    Ok(history)
}

/// How the accepted history grew, measured two ways.
#[derive(Clone, Copy, Debug)]
pub struct EquivalenceReport {
    /// Complexity of the m-th accepted label's representation against m.
    /// Slope ≈ r means the filtered experience looks like a typical
    /// observer's linear profile.
    pub label_complexity_fit: Option<crate::analysis::Fit>,
    /// Accepted count after n server steps against n, on the digit-count
    /// regressor. Slope ≈ 1 means perceived time runs logarithmically in
    /// server time.
    pub acceptance_fit: Option<crate::analysis::Fit>,
    /// True when every accepted label's complexity is at least r·ℓ — the
    /// accepted states really are the incompressible ones.
    pub incompressible: bool,
    /// Fewer than 3 accepted states: slopes undefined, fits absent.
    pub insufficient_data: bool,
}

/// Fits the two growth laws that operationalize "the filtered history is
/// the experience of a typical observer": complexity of accepted labels
/// linear in acceptance rank, acceptance count logarithmic in server time.
///
/// The machine must match the history's recorded id.
pub fn equivalence_report<M>(history: &ClientHistory, machine: &M) -> EquivalenceReport
where
    M: DescriptionMachine + ?Sized,
{
    assert_eq!(
        machine.id(),
        history.machine_id,
        "report must use the machine that produced the history"
    );
    let r = history.arity_exponent;
    debug_assert!(r >= 1);

    let mut complexity_series: Vec<(u64, f64)> = Vec::with_capacity(history.accepted.len());
    let mut incompressible = true;
    for (m, state) in history.accepted.iter().enumerate() {
        let repr = state.label.repr_bits(r);
        match machine.complexity(&repr, history.budget) {
            Some(value) => {
                complexity_series.push((m as u64 + 1, value.bits as f64));
                if value.bits < u64::from(r) * u64::from(state.digits) {
                    incompressible = false;
                }
            }
            None => incompressible = false,
        }
    }

    let insufficient_data = complexity_series.len() < 3;
    if insufficient_data {
        return EquivalenceReport {
            label_complexity_fit: None,
            acceptance_fit: None,
            incompressible,
            insufficient_data,
        };
    }

    let label_complexity_fit = crate::analysis::fit_linear(&complexity_series).ok();

    let mut count_series: Vec<(u64, f64)> = Vec::with_capacity(history.states_seen as usize);
    let mut count = 0usize;
    let mut next_accepted = history.accepted.iter().peekable();
    for n in 1..=history.states_seen {
        if next_accepted.peek().is_some_and(|s| s.index == n) {
            count += 1;
            next_accepted.next();
        }
        count_series.push((n, count as f64));
    }
    let acceptance_fit = crate::analysis::fit_log(&count_series).ok();

    EquivalenceReport {
        label_complexity_fit,
        acceptance_fit,
        incompressible,
        insufficient_data,
    }
}
