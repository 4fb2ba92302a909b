//! Evolution rules: k-regular successor maps over labels, k = 2^r.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::label::Label;

/// Largest supported arity exponent. 2^r successors are materialized per
/// state, so anything beyond this is unusable in practice.
pub const MAX_ARITY_EXPONENT: u32 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule domain exceeded at state {state}")]
    DomainExceeded { state: Label },
    #[error("state {state} has {got} successors, rule declares {expected}")]
    WrongSuccessorCount {
        state: Label,
        expected: u64,
        got: usize,
    },
    #[error("choice {choice} at position {position} out of range for arity {arity}")]
    ChoiceOutOfRange {
        position: usize,
        choice: u64,
        arity: u64,
    },
    #[error("operation requires a single-successor rule, arity is {arity}")]
    ArityNotOne { arity: u64 },
    #[error("arity exponent {r} exceeds supported maximum {max}", max = MAX_ARITY_EXPONENT)]
    ArityTooLarge { r: u32 },
}

/// One successor branch of an affine rule: x maps to a·x + b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineBranch {
    pub scale: BigUint,
    pub offset: BigUint,
}

impl AffineBranch {
    pub fn new(scale: impl Into<BigUint>, offset: impl Into<BigUint>) -> Self {
        AffineBranch {
            scale: scale.into(),
            offset: offset.into(),
        }
    }

    fn apply(&self, x: &BigUint) -> BigUint {
        &self.scale * x + &self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum SuccessorMap {
    /// Total: branch i maps x to scale·x + offset.
    Affine(Vec<AffineBranch>),
    /// Partial: defined only on the listed states.
    Table(BTreeMap<BigUint, Vec<BigUint>>),
}

/// A k-regular evolution rule, k = 2^r.
///
/// Successor order is meaningful: branch index = digit choice, so choice
/// sequences replay deterministically. Pairwise distinctness of successors
/// is a property of visited states checked by [`check_regularity`], not an
/// assumption enforced here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSystem {
    name: String,
    arity_exponent: u32,
    map: SuccessorMap,
}

impl RuleSystem {
    /// Rule with 2^r affine branches. Branch count must equal 2^r.
    pub fn affine(
        name: impl Into<String>,
        r: u32,
        branches: Vec<AffineBranch>,
    ) -> Result<Self, RuleError> {
        if r > MAX_ARITY_EXPONENT {
            return Err(RuleError::ArityTooLarge { r });
        }
        let expected = 1u64 << r;
        if branches.len() as u64 != expected {
            return Err(RuleError::WrongSuccessorCount {
                state: Label::zero(),
                expected,
                got: branches.len(),
            });
        }
        Ok(RuleSystem {
            name: name.into(),
            arity_exponent: r,
            map: SuccessorMap::Affine(branches),
        })
    }

    /// Rule defined by a finite successor table. Every entry must list
    /// exactly 2^r successors; querying outside the table is an error.
    pub fn table(
        name: impl Into<String>,
        r: u32,
        entries: BTreeMap<BigUint, Vec<BigUint>>,
    ) -> Result<Self, RuleError> {
        if r > MAX_ARITY_EXPONENT {
            return Err(RuleError::ArityTooLarge { r });
        }
        let expected = 1u64 << r;
        for (state, succ) in &entries {
            if succ.len() as u64 != expected {
                return Err(RuleError::WrongSuccessorCount {
                    state: Label::new(state.clone()),
                    expected,
                    got: succ.len(),
                });
            }
        }
        Ok(RuleSystem {
            name: name.into(),
            arity_exponent: r,
            map: SuccessorMap::Table(entries),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity_exponent(&self) -> u32 {
        self.arity_exponent
    }

    /// Number of successors per state, k = 2^r.
    pub fn arity(&self) -> u64 {
        1 << self.arity_exponent
    }

    /// Single-successor rules model deterministic evolution.
    pub fn is_deterministic(&self) -> bool {
        self.arity_exponent == 0
    }

    /// The k successors of `state`, in branch order.
    pub fn successors(&self, state: &Label) -> Result<Vec<Label>, RuleError> {
        match &self.map {
            SuccessorMap::Affine(branches) => Ok(branches
                .iter()
                .map(|b| Label::new(b.apply(state.value())))
                .collect()),
            SuccessorMap::Table(entries) => entries
                .get(state.value())
                .map(|succ| succ.iter().cloned().map(Label::new).collect())
                .ok_or_else(|| RuleError::DomainExceeded {
                    state: state.clone(),
                }),
        }
    }

    /// The successor selected by one branch choice.
    pub fn successor_at(&self, state: &Label, choice: u64) -> Result<Label, RuleError> {
        if choice >= self.arity() {
            return Err(RuleError::ChoiceOutOfRange {
                position: 0,
                choice,
                arity: self.arity(),
            });
        }
        match &self.map {
            SuccessorMap::Affine(branches) => {
                Ok(Label::new(branches[choice as usize].apply(state.value())))
            }
            SuccessorMap::Table(entries) => entries
                .get(state.value())
                .map(|succ| Label::new(succ[choice as usize].clone()))
                .ok_or_else(|| RuleError::DomainExceeded {
                    state: state.clone(),
                }),
        }
    }
}

/// Outcome of a regularity check over a set of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularityCheck {
    Pass,
    /// First state (in input order) whose successors are not pairwise distinct.
    Violation {
        state: Label,
    },
}

/// Checks that every listed state has pairwise-distinct successors.
pub fn check_regularity(rule: &RuleSystem, states: &[Label]) -> Result<RegularityCheck, RuleError> {
    for state in states {
        let succ = rule.successors(state)?;
        let mut sorted: Vec<&Label> = succ.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(RegularityCheck::Violation {
                state: state.clone(),
            });
        }
    }
    Ok(RegularityCheck::Pass)
}

/// x maps to {2x, 2x+1}: appends one binary digit per step.
pub fn binary_expansion_rule() -> RuleSystem {
    RuleSystem::affine(
        "be",
        1,
        vec![AffineBranch::new(2u32, 0u32), AffineBranch::new(2u32, 1u32)],
    )
    .expect("two branches for r=1")
}

/// x maps to x+1: the deterministic counting rule.
pub fn successor_rule() -> RuleSystem {
    RuleSystem::affine("cs", 0, vec![AffineBranch::new(1u32, 1u32)]).expect("one branch for r=0")
}

/// The 3-state table 1->{2,3}, 2->{1,3}, 3->{1,2}: 2-regular but confined
/// to three labels, so no path has growing complexity.
pub fn three_state_rule() -> RuleSystem {
    let mut entries = BTreeMap::new();
    entries.insert(
        BigUint::from(1u32),
        vec![BigUint::from(2u32), BigUint::from(3u32)],
    );
    entries.insert(
        BigUint::from(2u32),
        vec![BigUint::from(1u32), BigUint::from(3u32)],
    );
    entries.insert(
        BigUint::from(3u32),
        vec![BigUint::from(1u32), BigUint::from(2u32)],
    );
    RuleSystem::table("deg", 1, entries).expect("well-formed table")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(v: u64) -> Label {
        Label::from(v)
    }

    #[test]
    fn binary_expansion_successors_of_five() {
        let rule = binary_expansion_rule();
        assert_eq!(rule.successors(&lab(5)).unwrap(), vec![lab(10), lab(11)]);
    }

    #[test]
    fn successor_rule_increments() {
        let rule = successor_rule();
        assert_eq!(rule.successors(&lab(5)).unwrap(), vec![lab(6)]);
        assert_eq!(rule.successors(&lab(0)).unwrap(), vec![lab(1)]);
    }

    #[test]
    fn table_rule_maps_and_rejects_outside_domain() {
        let rule = three_state_rule();
        assert_eq!(rule.successors(&lab(1)).unwrap(), vec![lab(2), lab(3)]);
        assert_eq!(
            rule.successors(&lab(4)),
            Err(RuleError::DomainExceeded { state: lab(4) })
        );
    }

    #[test]
    fn branch_count_must_match_arity() {
        let err = RuleSystem::affine("bad", 1, vec![AffineBranch::new(1u32, 0u32)]).unwrap_err();
        assert!(matches!(
            err,
            RuleError::WrongSuccessorCount {
                expected: 2,
                got: 1,
                ..
            }
        ));

        let mut entries = BTreeMap::new();
        entries.insert(BigUint::from(1u32), vec![BigUint::from(2u32)]);
        let err = RuleSystem::table("bad", 1, entries).unwrap_err();
        assert!(matches!(
            err,
            RuleError::WrongSuccessorCount {
                expected: 2,
                got: 1,
                ..
            }
        ));
    }

    #[test]
    fn regularity_pass_and_violation() {
        let rule = binary_expansion_rule();
        let states: Vec<Label> = (1..=100u64).map(lab).collect();
        assert_eq!(
            check_regularity(&rule, &states).unwrap(),
            RegularityCheck::Pass
        );

        let dup = RuleSystem::affine(
            "dup",
            1,
            vec![AffineBranch::new(1u32, 0u32), AffineBranch::new(1u32, 0u32)],
        )
        .unwrap();
        assert_eq!(
            check_regularity(&dup, &[lab(1)]).unwrap(),
            RegularityCheck::Violation { state: lab(1) }
        );

        let deg = three_state_rule();
        let states: Vec<Label> = (1..=3u64).map(lab).collect();
        assert_eq!(
            check_regularity(&deg, &states).unwrap(),
            RegularityCheck::Pass
        );
    }

    #[test]
    fn successor_at_respects_branch_order() {
        let rule = binary_expansion_rule();
        assert_eq!(rule.successor_at(&lab(5), 0).unwrap(), lab(10));
        assert_eq!(rule.successor_at(&lab(5), 1).unwrap(), lab(11));
        assert!(matches!(
            rule.successor_at(&lab(5), 2),
            Err(RuleError::ChoiceOutOfRange { .. })
        ));
    }
}
