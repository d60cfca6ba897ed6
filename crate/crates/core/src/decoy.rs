//! Decoy-photon machinery for both channel crossings: preparation,
//! interleaving at secret positions, intercept-resend disturbance, and
//! error-rate verification.
//!
//! A decoy is a single photon in one of the four BB84 states. The sender
//! remembers position, basis and bit; after transmission the two ends
//! compare basis-matched measurements and abort when the error rate exceeds
//! the configured threshold. An intercept-resend eavesdropper measures every
//! item in a random basis and resends her outcome, which errs a verified
//! decoy with probability 1/4 and randomizes one component of a transported
//! EPR half.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::bell::BellIndex;
use crate::error::{Error, Result};

/// Preparation/measurement basis of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Computational basis {|0>, |1>}.
    Z,
    /// Hadamard basis {|+>, |->}.
    X,
}

/// A decoy photon: |0>, |1>, |+> or |-> depending on (basis, bit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoyPhoton {
    pub basis: Basis,
    pub bit: bool,
}

/// One item of a flying sequence: half of an EPR pair (identified by its
/// original pair index) or a decoy photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Pair(usize),
    Decoy(DecoyPhoton),
}

/// Where the decoys sit inside a combined sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoyLayout {
    positions: Vec<usize>,
    combined_len: usize,
}

impl DecoyLayout {
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn combined_len(&self) -> usize {
        self.combined_len
    }

    /// Merge payload items and decoys into one sequence, decoys at the
    /// layout positions and the payload in its original order elsewhere.
    pub fn assemble(&self, payload: &[usize], decoys: &[DecoyPhoton]) -> Vec<Slot> {
        assert_eq!(payload.len() + decoys.len(), self.combined_len);
        assert_eq!(decoys.len(), self.positions.len());
        let mut out = Vec::with_capacity(self.combined_len);
        let mut decoy_iter = decoys.iter();
        let mut payload_iter = payload.iter();
        let mut next_decoy = self.positions.iter().peekable();
        for pos in 0..self.combined_len {
            if next_decoy.peek() == Some(&&pos) {
                next_decoy.next();
                out.push(Slot::Decoy(
                    *decoy_iter.next().expect("decoy count matches layout"),
                ));
            } else {
                out.push(Slot::Pair(
                    *payload_iter.next().expect("payload count matches layout"),
                ));
            }
        }
        out
    }

    /// Split a combined sequence back into payload (original order) and the
    /// decoys found at the layout positions.
    pub fn strip(&self, sequence: &[Slot]) -> Result<(Vec<usize>, Vec<DecoyPhoton>)> {
        if sequence.len() != self.combined_len {
            return Err(Error::input(format!(
                "sequence length {} does not match layout length {}",
                sequence.len(),
                self.combined_len
            )));
        }
        let mut payload = Vec::with_capacity(self.combined_len - self.positions.len());
        let mut decoys = Vec::with_capacity(self.positions.len());
        let mut next_decoy = self.positions.iter().peekable();
        for (pos, slot) in sequence.iter().enumerate() {
            let is_decoy_pos = next_decoy.peek() == Some(&&pos);
            match (slot, is_decoy_pos) {
                (Slot::Decoy(p), true) => {
                    next_decoy.next();
                    decoys.push(*p);
                }
                (Slot::Pair(idx), false) => payload.push(*idx),
                _ => {
                    return Err(Error::internal(format!(
                        "slot kind at position {pos} disagrees with the decoy layout"
                    )))
                }
            }
        }
        Ok((payload, decoys))
    }
}

/// Draw `count` decoys, basis and bit independent and uniform.
pub fn prepare_decoys(count: usize, rng: &mut impl Rng) -> Vec<DecoyPhoton> {
    (0..count)
        .map(|_| DecoyPhoton {
            basis: if rng.gen_bool(0.5) {
                Basis::Z
            } else {
                Basis::X
            },
            bit: rng.gen_bool(0.5),
        })
        .collect()
}

/// Choose a uniformly random set of decoy positions inside a sequence of
/// `payload_len + decoy_count` items.
pub fn interleave_decoys(
    payload_len: usize,
    decoy_count: usize,
    rng: &mut impl Rng,
) -> DecoyLayout {
    let combined_len = payload_len + decoy_count;
    let mut positions = sample(rng, combined_len, decoy_count).into_vec();
    positions.sort_unstable();
    DecoyLayout {
        positions,
        combined_len,
    }
}

/// Measure a photon in the given basis. A basis mismatch yields a uniformly
/// random outcome.
pub fn measure_in_basis(photon: DecoyPhoton, basis: Basis, rng: &mut impl Rng) -> bool {
    if photon.basis == basis {
        photon.bit
    } else {
        rng.gen_bool(0.5)
    }
}

/// Eve's effect on one decoy: measure in `eve_basis`, resend the outcome.
pub fn disturb_decoy(photon: DecoyPhoton, eve_basis: Basis, rng: &mut impl Rng) -> DecoyPhoton {
    let bit = measure_in_basis(photon, eve_basis, rng);
    DecoyPhoton {
        basis: eve_basis,
        bit,
    }
}

/// Eve's effect on a transported EPR half: measuring in Z randomizes the
/// pair's phase-flip component, measuring in X randomizes its bit-flip
/// component. Matches the dense-oracle collapse distribution exactly.
pub fn disturb_pair_half(state: &mut BellIndex, eve_basis: Basis, rng: &mut impl Rng) {
    match eve_basis {
        Basis::Z => state.z_bit ^= rng.gen_bool(0.5),
        Basis::X => state.x_bit ^= rng.gen_bool(0.5),
    }
}

/// Intercept-resend attack over a whole flying sequence. Decoy positions are
/// secret, so every item is attacked; pair disturbances are applied to the
/// shared `pair_states` (indexed by original pair index).
pub fn eve_intercept_resend(
    sequence: &mut [Slot],
    pair_states: &mut [BellIndex],
    rng: &mut impl Rng,
) {
    for slot in sequence.iter_mut() {
        let eve_basis = if rng.gen_bool(0.5) {
            Basis::Z
        } else {
            Basis::X
        };
        match slot {
            Slot::Decoy(photon) => *photon = disturb_decoy(*photon, eve_basis, rng),
            Slot::Pair(idx) => disturb_pair_half(&mut pair_states[*idx], eve_basis, rng),
        }
    }
}

/// Outcome of one decoy verification round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionReport {
    pub decoy_count: usize,
    pub error_count: usize,
    pub error_rate: f64,
    pub aborted: bool,
}

/// Compare received decoys against the prepared ones by measuring each in
/// its preparation basis. A zero-decoy round reports error rate 0 and never
/// aborts (no evidence either way; visible via `decoy_count`).
pub fn verify_decoys(
    received: &[DecoyPhoton],
    prepared: &[DecoyPhoton],
    threshold: f64,
    rng: &mut impl Rng,
) -> Result<TransmissionReport> {
    if received.len() != prepared.len() {
        return Err(Error::input(format!(
            "received {} decoys but {} were prepared",
            received.len(),
            prepared.len()
        )));
    }
    let error_count = received
        .iter()
        .zip(prepared)
        .filter(|(got, want)| measure_in_basis(**got, want.basis, rng) != want.bit)
        .count();
    let error_rate = if prepared.is_empty() {
        0.0
    } else {
        error_count as f64 / prepared.len() as f64
    };
    Ok(TransmissionReport {
        decoy_count: prepared.len(),
        error_count,
        error_rate,
        aborted: error_rate > threshold,
    })
}

/// Which channel crossings an eavesdropper sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegSet {
    pub forward_bob: bool,
    pub forward_charlie: bool,
    pub return_bob: bool,
    pub return_charlie: bool,
}

impl LegSet {
    pub const ALL: LegSet = LegSet {
        forward_bob: true,
        forward_charlie: true,
        return_bob: true,
        return_charlie: true,
    };
    pub const FORWARD: LegSet = LegSet {
        forward_bob: true,
        forward_charlie: true,
        return_bob: false,
        return_charlie: false,
    };
    pub const FORWARD_BOB: LegSet = LegSet {
        forward_bob: true,
        forward_charlie: false,
        return_bob: false,
        return_charlie: false,
    };
    pub const FORWARD_CHARLIE: LegSet = LegSet {
        forward_bob: false,
        forward_charlie: true,
        return_bob: false,
        return_charlie: false,
    };
    pub const RETURN: LegSet = LegSet {
        forward_bob: false,
        forward_charlie: false,
        return_bob: true,
        return_charlie: true,
    };
}

impl FromStr for LegSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(LegSet::ALL),
            "forward" => Ok(LegSet::FORWARD),
            "forward-bob" => Ok(LegSet::FORWARD_BOB),
            "forward-charlie" => Ok(LegSet::FORWARD_CHARLIE),
            "return" => Ok(LegSet::RETURN),
            other => Err(Error::input(format!(
                "unknown leg set {other:?} (expected all, forward, forward-bob, forward-charlie or return)"
            ))),
        }
    }
}

/// Eavesdropper model for a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EveModel {
    None,
    /// Intercept-resend with a uniformly random basis per intercepted item.
    InterceptResend(LegSet),
}

impl EveModel {
    pub fn attacks_forward_bob(&self) -> bool {
        matches!(self, EveModel::InterceptResend(l) if l.forward_bob)
    }

    pub fn attacks_forward_charlie(&self) -> bool {
        matches!(self, EveModel::InterceptResend(l) if l.forward_charlie)
    }

    pub fn attacks_return_bob(&self) -> bool {
        matches!(self, EveModel::InterceptResend(l) if l.return_bob)
    }

    pub fn attacks_return_charlie(&self) -> bool {
        matches!(self, EveModel::InterceptResend(l) if l.return_charlie)
    }
}

impl FromStr for EveModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            Ok(EveModel::None)
        } else {
            s.parse::<LegSet>().map(EveModel::InterceptResend)
        }
    }
}
