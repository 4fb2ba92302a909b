//! Simulation and measurement toolkit for k-regular multiway (branching)
//! and deterministic (chain) state dynamics.
//!
//! The crate has three layers:
//!
//! * **Dynamics** — [`Label`]s evolve under a [`RuleSystem`] (k = 2^r ordered
//!   successors per state). Paths, breadth-first enumerations, levels, cycle
//!   detection, and regularity checks live in [`multiway`]. Rules are written
//!   in a small text format parsed by [`dsl`].
//! * **Complexity** — a [`machine::DescriptionMachine`] decodes program
//!   bitstrings to output bitstrings; [`complexity`] computes minimal program
//!   lengths (descriptive complexity) via a machine-specific inverter or an
//!   exhaustive program-enumeration oracle, and [`chaitin`] derives the
//!   geometric progression of smallest incompressible numbers per digit
//!   length.
//! * **Interpretation** — [`server`] streams BFS-ordered states as framed
//!   bytes, [`client`] filters them through the Chaitin progression into a
//!   single-world history, and [`analysis`] classifies complexity growth as
//!   linear, logarithmic, or bounded.
//!
//! All operations are deterministic functions of their inputs; randomness
//! only enters through caller-supplied seeds.

pub mod analysis;
pub mod bits;
pub mod chaitin;
pub mod client;
pub mod complexity;
pub mod dsl;
pub mod frame;
pub mod label;
pub mod machine;
pub mod multiway;
pub mod rule;
pub mod server;

pub use bits::BitString;
pub use chaitin::ChaitinProgression;
pub use client::{client_filter, in_process_history, perceived_time, ClientHistory};
pub use complexity::{ComplexityTable, ComplexityValue};
pub use dsl::{compile, parse_rule, RuleSpec};
pub use label::Label;
pub use machine::{DecodeResult, DescriptionMachine, Rm1};
pub use multiway::ObserverExperience;
pub use rule::{RuleError, RuleSystem};
pub use server::serve;
