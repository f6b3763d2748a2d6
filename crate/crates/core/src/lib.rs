//! Partitioning of quantum circuits across multiple QPUs.
//!
//! The pipeline reads an OpenQASM 2 circuit ([`circuit`]), finds runs of
//! controlled gates that can share one ebit pair ([`grouping`]), translates
//! the circuit into a hypergraph ([`hypergraph`]), partitions it with a
//! Fiduccia–Mattheyses refinement under per-QPU capacities ([`partition`]),
//! and turns the result into per-QPU subcircuits with explicit
//! communication channels ([`distribution`]). [`oracle`] holds exhaustive
//! and simulation-based checks, [`bench`] the circuit generators and the
//! experiment runner.

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod grouping;
pub mod hypergraph;
pub mod oracle;
pub mod partition;

pub use error::{Error, Result};
