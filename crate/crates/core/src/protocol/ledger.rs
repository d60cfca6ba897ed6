//! Per-pair lifecycle records.

use serde::Serialize;

use crate::bell::{BellIndex, PauliCode};

/// Whether a pair carries digest blocks or serves as a sampling pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairRole {
    Encoded,
    Sampling,
}

/// Everything that happens to one EPR pair during a run. Encoding codes are
/// present exactly on encoded pairs; a mask only on sampling pairs in
/// hardened runs; `measured` stays empty when the run aborts early.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLedger {
    pub original_index: usize,
    pub initial: BellIndex,
    pub role: PairRole,
    pub code_b: Option<PauliCode>,
    pub code_c: Option<PauliCode>,
    pub mask: Option<PauliCode>,
    pub permuted_position: usize,
    pub measured: Option<BellIndex>,
}

impl PairLedger {
    pub fn new(original_index: usize, initial: BellIndex, role: PairRole) -> Self {
        PairLedger {
            original_index,
            initial,
            role,
            code_b: None,
            code_c: None,
            mask: None,
            permuted_position: original_index,
            measured: None,
        }
    }
}
