//! Simulation and cryptanalysis toolkit for a three-party quantum private
//! comparison protocol.
//!
//! Two players hold secret inputs and learn, with the help of a semi-trusted
//! third party, whether the inputs are equal and nothing more. The crate
//! models the five-step EPR-pair protocol exactly (Bell-state algebra,
//! decoy-photon channel checks, per-party views), a counting attack by
//! which a semi-honest third party reads the comparison result off his own
//! Bell-state statistics, and the masking countermeasure that defeats it.
//! A Monte Carlo harness quantifies attack soundness, power and detection
//! rates; with the default `parallel` feature trials run on rayon with
//! results identical to the sequential fallback.

pub mod adversary;
pub mod bell;
pub mod bits;
pub mod countermeasure;
pub mod decoy;
pub mod dense;
pub mod error;
pub mod exec;
pub mod harness;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
