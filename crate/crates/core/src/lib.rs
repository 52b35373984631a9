//! Stark-chirped rapid adiabatic passage (SCRAP) in Josephson phase qubits.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectrum`]: washboard-potential bound states and matrix elements.
//! - [`pulse`] and [`hamiltonians`]: pulse envelopes and time-dependent
//!   Hamiltonians for single- and two-qubit passages.
//! - [`propagator`]: unitary time stepping, adiabaticity monitoring and the
//!   Landau-Zener oracle.
//! - [`gates`]: phase bookkeeping, phase correction and gate scores.
//! - [`cli`]: scenario configs, runners and file output.

pub mod cli;
pub mod error;
pub mod gates;
pub mod hamiltonians;
pub mod propagator;
pub mod pulse;
pub mod spectrum;
pub mod units;

pub use error::{Result, ScrapError};
