//! Masking of sampling pairs, the fix that defeats the counting attack.
//!
//! In a baseline run the sampling pairs never change state, so with equal
//! digests the attacker's two count vectors always match. Hardened runs
//! apply a secret encoding to each sampling pair (on Bob's half only; if
//! both players applied the same code the pair would end up unchanged), so
//! counts move even when the digests are equal and a count difference no
//! longer certifies anything. The third party's honesty check must then
//! compare each sampling outcome against the mask-shifted announced state
//! instead of the announced state itself.

use rand::Rng;

use crate::bell::{pauli_action, BellIndex, PauliCode, Side};
use crate::error::{Error, Result};
use crate::protocol::ledger::{PairLedger, PairRole};
use crate::protocol::secret::SharedSecret;
use crate::rng::stream;

/// The per-sampling-pair secret codes, known to both players, never to the
/// third party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSchedule(Vec<PauliCode>);

impl MaskSchedule {
    pub fn from_codes(codes: Vec<PauliCode>) -> Self {
        MaskSchedule(codes)
    }

    pub fn codes(&self) -> &[PauliCode] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Derive the mask schedule for `k` sampling pairs from the shared secret.
/// Each code is uniform over all four encodings, identity included.
pub fn derive_masks(secret: &SharedSecret, k: usize) -> MaskSchedule {
    let mut rng = secret.derivation_rng(stream::SECRET_MASKS);
    MaskSchedule(
        (0..k)
            .map(|_| PauliCode::from_index(rng.gen_range(0..4)))
            .collect(),
    )
}

/// Apply the schedule to the sampling pairs: pair j's state becomes
/// `pauli_action(schedule[j], Bob, state)` and the mask is recorded in the
/// ledger (player-side knowledge).
pub fn apply_masks(
    ledger: &mut [PairLedger],
    states: &mut [BellIndex],
    schedule: &MaskSchedule,
) -> Result<()> {
    let sampling: Vec<usize> = ledger
        .iter()
        .filter(|p| p.role == PairRole::Sampling)
        .map(|p| p.original_index)
        .collect();
    if sampling.len() != schedule.len() {
        return Err(Error::input(format!(
            "mask schedule covers {} pairs but the run has {} sampling pairs",
            schedule.len(),
            sampling.len()
        )));
    }
    for (j, &idx) in sampling.iter().enumerate() {
        let mask = schedule.codes()[j];
        states[idx] = pauli_action(mask, Side::Bob, states[idx]);
        ledger[idx].mask = Some(mask);
    }
    Ok(())
}

/// The state a sampling pair should measure as when the third party is
/// honest: the announced initial, shifted by the pair's mask if any.
pub fn expected_sampling_state(announced: BellIndex, mask: Option<PauliCode>) -> BellIndex {
    match mask {
        Some(code) => pauli_action(code, Side::Bob, announced),
        None => announced,
    }
}

/// Fraction of sampling pairs whose published outcome disagrees with the
/// mask-adjusted beforehand announcement.
///
/// `published` holds the outcomes in wire order, `announcement` the sampling
/// initials in original order, and `sampling_positions[j]` the wire position
/// of sampling pair j. Pass no schedule for the baseline (unmasked) rule.
pub fn adjusted_verify_tp(
    published: &[BellIndex],
    announcement: &[BellIndex],
    schedule: Option<&MaskSchedule>,
    sampling_positions: &[usize],
) -> Result<f64> {
    if announcement.len() != sampling_positions.len() {
        return Err(Error::input(format!(
            "announcement covers {} pairs but {} sampling positions were given",
            announcement.len(),
            sampling_positions.len()
        )));
    }
    if let Some(masks) = schedule {
        if masks.len() != announcement.len() {
            return Err(Error::input(format!(
                "mask schedule covers {} pairs but the announcement has {}",
                masks.len(),
                announcement.len()
            )));
        }
    }
    if announcement.is_empty() {
        return Ok(0.0);
    }
    let mismatches = announcement
        .iter()
        .enumerate()
        .filter(|(j, &announced)| {
            let mask = schedule.map(|s| s.codes()[*j]);
            published[sampling_positions[*j]] != expected_sampling_state(announced, mask)
        })
        .count();
    Ok(mismatches as f64 / announcement.len() as f64)
}

/// Exact probability that a hardened equal-digest run flips the counting
/// verdict, by enumeration of all mask schedules and sampling assignments.
/// For k = 1 this is 3/4: only the identity mask preserves the counts.
pub fn false_positive_rate_exhaustive(k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    if k > 5 {
        return Err(Error::input(format!(
            "exhaustive mask enumeration is limited to k <= 5, got k={k}"
        )));
    }
    let space = 1u64 << (2 * k);
    let mut flipped = 0u64;
    for assignment in 0..space {
        for masks in 0..space {
            // Blockwise XOR is exactly the one-sided mask application.
            let moved = assignment ^ masks;
            let counts = |packed: u64| {
                let mut c = [0u64; 4];
                for i in 0..k {
                    c[((packed >> (2 * i)) & 3) as usize] += 1;
                }
                c
            };
            if counts(assignment) != counts(moved) {
                flipped += 1;
            }
        }
    }
    Ok(flipped as f64 / (space as f64 * space as f64))
}
