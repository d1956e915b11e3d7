//! Coded MapReduce shuffling for graph analytics.
//!
//! Vertices are Mapped redundantly on `K` logical workers so that the Shuffle can multicast
//! XOR-coded segments instead of unicasting every intermediate value. The crate provides random
//! graph generators, Map/Reduce allocations, the coded and uncoded shuffles, an in-process
//! execution engine with exact load accounting, and closed-form load calculators.

pub mod allocation;
pub mod analysis;
pub mod engine;
pub mod error;
pub mod graphs;
pub mod programs;
pub mod shuffle;
pub mod verify;
pub mod workers;

pub use error::{Error, Result};
