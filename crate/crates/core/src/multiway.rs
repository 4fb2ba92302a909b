//! Paths, breadth-first enumeration, levels, and cycle detection for the
//! multiway tree generated by a rule.

use std::collections::VecDeque;

use num_bigint::BigUint;
use rand::Rng;

use crate::label::Label;
use crate::rule::{RuleError, RuleSystem};

/// One root-to-node path through the multiway tree together with the branch
/// choices that generated it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObserverExperience {
    start: Label,
    choices: Vec<u64>,
    states: Vec<Label>,
    arity_exponent: u32,
}

impl ObserverExperience {
    pub fn start(&self) -> &Label {
        &self.start
    }

    pub fn choices(&self) -> &[u64] {
        &self.choices
    }

    /// states[0] = start; states[i+1] follows branch choices[i].
    pub fn states(&self) -> &[Label] {
        &self.states
    }

    /// Number of evolution steps (states() has length n+1).
    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn arity_exponent(&self) -> u32 {
        self.arity_exponent
    }
}

/// Follows `choices` from `start`, recording every state.
pub fn evolve_path(
    rule: &RuleSystem,
    start: Label,
    choices: &[u64],
) -> Result<ObserverExperience, RuleError> {
    let arity = rule.arity();
    let mut states = Vec::with_capacity(choices.len() + 1);
    states.push(start.clone());
    for (position, &choice) in choices.iter().enumerate() {
        if choice >= arity {
            return Err(RuleError::ChoiceOutOfRange {
                position,
                choice,
                arity,
            });
        }
        let next = rule.successor_at(states.last().expect("nonempty"), choice)?;
        states.push(next);
    }
    Ok(ObserverExperience {
        start,
        choices: choices.to_vec(),
        states,
        arity_exponent: rule.arity_exponent(),
    })
}

/// Uniform branch choices from a caller-seeded generator.
pub fn random_choices(rng: &mut impl Rng, arity: u64, depth: usize) -> Vec<u64> {
    (0..depth).map(|_| rng.random_range(0..arity)).collect()
}

/// Breadth-first enumeration of the multiway tree rooted at one state.
///
/// Emits (index, label) with the root at index 1, then level by level:
/// parents in their own emission order, branches in index order. Lazy, so a
/// server can stream from it; table rules may fail mid-stream when the
/// frontier leaves their domain.
pub struct BfsEnumerator<'a> {
    rule: &'a RuleSystem,
    /// Discovered but not yet emitted.
    frontier: VecDeque<Label>,
    /// Emitted but not yet expanded; parents are expanded only when the
    /// frontier runs dry, so a table rule fails exactly at the first index
    /// whose state cannot be derived — every state before it still streams.
    pending: VecDeque<Label>,
    next_index: u64,
    remaining: u64,
    failed: bool,
}

impl<'a> BfsEnumerator<'a> {
    pub fn new(rule: &'a RuleSystem, root: Label, count: u64) -> Self {
        let mut frontier = VecDeque::new();
        frontier.push_back(root);
        BfsEnumerator {
            rule,
            frontier,
            pending: VecDeque::new(),
            next_index: 1,
            remaining: count,
            failed: false,
        }
    }
}

impl Iterator for BfsEnumerator<'_> {
    type Item = Result<(u64, Label), RuleError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.remaining == 0 {
            return None;
        }
        while self.frontier.is_empty() {
            let parent = self.pending.pop_front()?;
            match self.rule.successors(&parent) {
                Ok(children) => self.frontier.extend(children),
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        let state = self.frontier.pop_front().expect("nonempty frontier");
        self.pending.push_back(state.clone());
        let index = self.next_index;
        self.next_index += 1;
        self.remaining -= 1;
        Some(Ok((index, state)))
    }
}

/// First `count` states of the tree in BFS order, starting at index 1.
pub fn bfs_enumerate(
    rule: &RuleSystem,
    root: Label,
    count: u64,
) -> Result<Vec<(u64, Label)>, RuleError> {
    BfsEnumerator::new(rule, root, count).collect()
}

/// 1-based BFS index of the node reached from the root by `choices`.
///
/// In the k-ary heap layout the j-th child of node i sits at k(i-1) + 2 + j;
/// for k = 2 this is the binary number "1" followed by the choice bits.
pub fn bfs_index_of_choices(arity: u64, choices: &[u64]) -> BigUint {
    let k = BigUint::from(arity);
    let one = BigUint::from(1u32);
    let two = BigUint::from(2u32);
    let mut index = one.clone();
    for &c in choices {
        index = &k * (index - &one) + &two + BigUint::from(c);
    }
    index
}

/// One depth level of the multiway tree; members are ordered with
/// multiplicity (k^d of them for a k-regular rule).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiwayLevel {
    pub depth: u64,
    pub members: Vec<Label>,
}

/// Levels 0..=depth of the tree rooted at `root`.
pub fn levels(rule: &RuleSystem, root: Label, depth: u64) -> Result<Vec<MultiwayLevel>, RuleError> {
    let mut out = Vec::with_capacity(depth as usize + 1);
    let mut current = vec![root];
    for d in 0..=depth {
        out.push(MultiwayLevel {
            depth: d,
            members: current.clone(),
        });
        if d < depth {
            let mut next = Vec::with_capacity(current.len() * rule.arity() as usize);
            for state in &current {
                next.extend(rule.successors(state)?);
            }
            current = next;
        }
    }
    Ok(out)
}

/// Result of a budgeted cycle search on a deterministic orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleReport {
    /// The orbit repeats: x_(preperiod + n) = x_(preperiod + n + period).
    /// The first repeated state occurs at step preperiod + period.
    Found { period: u64, preperiod: u64 },
    /// No state repeats within the first `max_steps` steps. Not a proof of
    /// aperiodicity.
    NoCycleWithinBudget,
}

/// Searches the orbit prefix x_0..x_max_steps of a single-successor rule for
/// a repeated state, reporting the least period and preperiod.
///
/// Brent's algorithm in O(1) state storage. Phase one races a teleporting
/// tortoise against a stepping hare to find the period; two synchronized
/// walkers then locate the preperiod. The application cap is generous enough
/// that any orbit with preperiod + period <= max_steps is certain to be
/// found; a final check enforces that bound exactly.
pub fn detect_cycle(
    rule: &RuleSystem,
    start: &Label,
    max_steps: u64,
) -> Result<CycleReport, RuleError> {
    if rule.arity() != 1 {
        return Err(RuleError::ArityNotOne {
            arity: rule.arity(),
        });
    }
    let step = |x: &Label| -> Result<Label, RuleError> { rule.successor_at(x, 0) };

    let mut applications: u64 = 0;
    let cap = max_steps.saturating_mul(8).saturating_add(16);

    // Phase one: find the period.
    let mut power: u64 = 1;
    let mut period: u64 = 1;
    let mut tortoise = start.clone();
    let mut hare = step(start)?;
    applications += 1;
    while tortoise != hare {
        if applications >= cap {
            return Ok(CycleReport::NoCycleWithinBudget);
        }
        if power == period {
            tortoise = hare.clone();
            power *= 2;
            period = 0;
        }
        hare = step(&hare)?;
        applications += 1;
        period += 1;
    }

    // Phase two: walk two pointers `period` apart to find the preperiod.
    let mut front = start.clone();
    for _ in 0..period {
        front = step(&front)?;
    }
    let mut back = start.clone();
    let mut preperiod: u64 = 0;
    while back != front {
        back = step(&back)?;
        front = step(&front)?;
        preperiod += 1;
    }

    if preperiod + period <= max_steps {
        Ok(CycleReport::Found { period, preperiod })
    } else {
        Ok(CycleReport::NoCycleWithinBudget)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::collections::HashMap;

    use super::*;
    use crate::rule::{binary_expansion_rule, successor_rule, three_state_rule, AffineBranch};

    fn lab(v: u64) -> Label {
        Label::from(v)
    }

    fn modular_increment_rule(modulus: u64) -> RuleSystem {
        let mut entries = BTreeMap::new();
        for x in 0..modulus {
            entries.insert(BigUint::from(x), vec![BigUint::from((x + 1) % modulus)]);
        }
        RuleSystem::table("modinc", 0, entries).unwrap()
    }

    #[test]
    fn evolve_path_binary_expansion() {
        let rule = binary_expansion_rule();
        let exp = evolve_path(&rule, lab(1), &[1, 0, 1]).unwrap();
        assert_eq!(exp.states(), &[lab(1), lab(3), lab(6), lab(13)]);
        assert_eq!(exp.len(), 3);
    }

    #[test]
    fn evolve_path_empty_choices_is_identity() {
        let rule = three_state_rule();
        let exp = evolve_path(&rule, lab(2), &[]).unwrap();
        assert_eq!(exp.states(), &[lab(2)]);
        assert!(exp.is_empty());
    }

    #[test]
    fn evolve_path_successor_chain() {
        let rule = successor_rule();
        let exp = evolve_path(&rule, lab(1), &[0, 0, 0]).unwrap();
        assert_eq!(exp.states(), &[lab(1), lab(2), lab(3), lab(4)]);
    }

    #[test]
    fn evolve_path_rejects_bad_choice_with_position() {
        let rule = binary_expansion_rule();
        let err = evolve_path(&rule, lab(1), &[0, 2, 0]).unwrap_err();
        assert_eq!(
            err,
            RuleError::ChoiceOutOfRange {
                position: 1,
                choice: 2,
                arity: 2
            }
        );
    }

    #[test]
    fn bfs_binary_expansion_labels_equal_indices() {
        let rule = binary_expansion_rule();
        let nodes = bfs_enumerate(&rule, lab(1), 7).unwrap();
        let labels: Vec<Label> = nodes.iter().map(|(_, l)| l.clone()).collect();
        assert_eq!(labels, (1..=7u64).map(lab).collect::<Vec<_>>());
        assert_eq!(nodes[0].0, 1);
        assert_eq!(nodes[6].0, 7);
    }

    #[test]
    fn bfs_on_chain_is_the_chain() {
        let rule = successor_rule();
        let nodes = bfs_enumerate(&rule, lab(1), 4).unwrap();
        let labels: Vec<Label> = nodes.into_iter().map(|(_, l)| l).collect();
        assert_eq!(labels, vec![lab(1), lab(2), lab(3), lab(4)]);
    }

    #[test]
    fn bfs_three_state_first_seven() {
        // Hand expansion: root 1, level one [2,3], level two [1,3] ++ [1,2].
        let rule = three_state_rule();
        let labels: Vec<Label> = bfs_enumerate(&rule, lab(1), 7)
            .unwrap()
            .into_iter()
            .map(|(_, l)| l)
            .collect();
        let expected: Vec<Label> = [1u64, 2, 3, 1, 3, 1, 2].iter().map(|&v| lab(v)).collect();
        assert_eq!(labels, expected);
    }

    #[test]
    fn bfs_stops_cleanly_at_table_edge() {
        // Domain {1} with 1 -> [9]: the last requested node is emitted
        // without expanding it, so enumeration works up to the domain edge.
        let mut entries = BTreeMap::new();
        entries.insert(BigUint::from(1u32), vec![BigUint::from(9u32)]);
        let rule = RuleSystem::table("tiny", 0, entries).unwrap();
        assert_eq!(
            bfs_enumerate(&rule, lab(1), 2).unwrap(),
            vec![(1, lab(1)), (2, lab(9))]
        );
        let err = bfs_enumerate(&rule, lab(1), 3).unwrap_err();
        assert_eq!(err, RuleError::DomainExceeded { state: lab(9) });
    }

    #[test]
    fn bfs_index_matches_choice_bits() {
        // For k=2 the index is "1" ++ choices read as binary.
        assert_eq!(bfs_index_of_choices(2, &[]), BigUint::from(1u32));
        assert_eq!(bfs_index_of_choices(2, &[1, 0, 1]), BigUint::from(13u32));
        assert_eq!(bfs_index_of_choices(2, &[0, 0]), BigUint::from(4u32));
        assert_eq!(bfs_index_of_choices(4, &[3]), BigUint::from(5u32));
    }

    #[test]
    fn levels_have_arity_power_cardinality() {
        let rule = binary_expansion_rule();
        let lvls = levels(&rule, lab(1), 5).unwrap();
        for (d, level) in lvls.iter().enumerate() {
            assert_eq!(level.depth, d as u64);
            assert_eq!(level.members.len(), 1usize << d);
        }
        let deg = three_state_rule();
        let lvls = levels(&deg, lab(1), 8).unwrap();
        assert_eq!(lvls[8].members.len(), 1 << 8);
    }

    #[test]
    fn detect_cycle_on_modular_increment() {
        let rule = modular_increment_rule(5);
        assert_eq!(
            detect_cycle(&rule, &lab(0), 100).unwrap(),
            CycleReport::Found {
                period: 5,
                preperiod: 0
            }
        );
    }

    #[test]
    fn detect_cycle_fixed_point() {
        let rule = RuleSystem::affine("id", 0, vec![AffineBranch::new(1u32, 0u32)]).unwrap();
        assert_eq!(
            detect_cycle(&rule, &lab(7), 10).unwrap(),
            CycleReport::Found {
                period: 1,
                preperiod: 0
            }
        );
    }

    #[test]
    fn detect_cycle_open_orbit_exhausts_budget() {
        let rule = successor_rule();
        assert_eq!(
            detect_cycle(&rule, &lab(1), 1000).unwrap(),
            CycleReport::NoCycleWithinBudget
        );
    }

    #[test]
    fn detect_cycle_rejects_branching_rules() {
        let rule = binary_expansion_rule();
        assert_eq!(
            detect_cycle(&rule, &lab(1), 10),
            Err(RuleError::ArityNotOne { arity: 2 })
        );
    }

    #[test]
    fn detect_cycle_with_preperiod() {
        // 0 -> 1 -> 2 -> 3 -> 4 -> 2: preperiod 2, period 3.
        let mut entries = BTreeMap::new();
        for (x, y) in [(0u64, 1u64), (1, 2), (2, 3), (3, 4), (4, 2)] {
            entries.insert(BigUint::from(x), vec![BigUint::from(y)]);
        }
        let rule = RuleSystem::table("rho", 0, entries).unwrap();
        assert_eq!(
            detect_cycle(&rule, &lab(0), 100).unwrap(),
            CycleReport::Found {
                period: 3,
                preperiod: 2
            }
        );
        // Budget below preperiod + period reports no cycle.
        assert_eq!(
            detect_cycle(&rule, &lab(0), 4).unwrap(),
            CycleReport::NoCycleWithinBudget
        );
        assert_eq!(
            detect_cycle(&rule, &lab(0), 5).unwrap(),
            CycleReport::Found {
                period: 3,
                preperiod: 2
            }
        );
    }

    /// Brute-force oracle: hash every state until one repeats.
    fn scan_cycle(rule: &RuleSystem, start: &Label, max_steps: u64) -> CycleReport {
        let mut seen: HashMap<Label, u64> = HashMap::new();
        let mut x = start.clone();
        for i in 0..=max_steps {
            if let Some(&first) = seen.get(&x) {
                return CycleReport::Found {
                    period: i - first,
                    preperiod: first,
                };
            }
            seen.insert(x.clone(), i);
            if i < max_steps {
                x = rule.successor_at(&x, 0).unwrap();
            }
        }
        CycleReport::NoCycleWithinBudget
    }

    #[test]
    fn detect_cycle_agrees_with_scan_on_random_tables() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.random_range(1..=60u64);
            let mut entries = BTreeMap::new();
            for x in 0..n {
                entries.insert(
                    BigUint::from(x),
                    vec![BigUint::from(rng.random_range(0..n))],
                );
            }
            let rule = RuleSystem::table("rand", 0, entries).unwrap();
            let start = lab(rng.random_range(0..n));
            // Any orbit over n states repeats within n steps.
            for budget in [n, n + 7, 2 * n] {
                assert_eq!(
                    detect_cycle(&rule, &start, budget).unwrap(),
                    scan_cycle(&rule, &start, budget),
                    "n={n} start={start} budget={budget}"
                );
            }
        }
    }
}
