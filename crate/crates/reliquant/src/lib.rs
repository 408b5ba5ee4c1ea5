//! Quantified software reliability toolkit.
//!
//! Three things have to line up before a number can be written next to a
//! software component in a system fault tree: the tree arithmetic itself,
//! a statistical model that turns failure-free testing into a bounded claim,
//! and a test campaign that actually produces that evidence at scale. This
//! crate provides all three:
//!
//! - [`tree`] — coherent AND/OR fault trees: parsing, minimal cut sets,
//!   exact and rare-event top probabilities, Birnbaum and Fussell-Vesely
//!   importance, and improvement rankings.
//! - [`stats`] — zero-failure ("balls and urn") reliability statistics:
//!   required test counts, achieved confidence, demonstrated bounds, and the
//!   per-hour variants.
//! - [`domain`] — finite cartesian input domains with exact mixed-radix
//!   indexing, balanced partitioning, and streaming (filtered) enumeration.
//! - [`profile`] — operational input distributions as weighted strata, with
//!   deterministic seeded sampling.
//! - [`campaign`] — exhaustive, partial-exhaustive, and statistical test
//!   campaigns with pluggable subjects and oracles, parallel workers, and
//!   claim/certificate synthesis feeding back into fault trees.
//!
//! Start with the runnable examples (`cargo run --example dominance_inversion`)
//! or the `reliquant` binary (`reliquant plan --pfd 1e-6 --confidence 0.99`).

pub mod campaign;
pub mod cli;
pub mod domain;
pub mod profile;
pub mod stats;
pub mod tree;

mod rng;
