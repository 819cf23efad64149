//! Property-based-testing generators with two interchangeable backends.
//!
//! * [`baseline`] is a conventional monadic combinator library: a generator
//!   is a boxed closure over `(size, seed)` and every bind builds a fresh
//!   continuation at run time.
//! * [`staged`] exposes the same combinators, but running them emits a flat
//!   A-normal-form program that is lowered once into a compact evaluator.
//!
//! Both draw from the same [`rand::Seed`] in the same order, so for a fixed
//! seed they produce identical values and leave the seed in the same state.
//! [`derive`] builds both kinds of generator from a datatype schema,
//! [`workloads`] holds the benchmark generators, properties and injected
//! bugs, [`harness`] measures generation speed and time-to-failure, and
//! [`chart`] renders results as SVG.

pub mod baseline;
pub mod chart;
pub mod derive;
pub mod error;
pub mod harness;
pub mod rand;
pub mod staged;
pub mod workloads;

pub use error::{GenError, StageError};
pub use rand::{Seed, Variant};
