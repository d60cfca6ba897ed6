//! Dense 4-amplitude verification oracle for the symbolic Bell algebra.
//!
//! Everything in [`crate::bell`] is two XORs; this module redoes the same
//! operations with explicit complex amplitudes in the computational basis
//! (|00>, |01>, |10>, |11>) so the symbolic rules can be checked case by
//! case. States are compared by overlap magnitude, which makes the oracle
//! insensitive to global phase, exactly like a Bell-basis measurement.

use num_complex::Complex64;

use crate::bell::{BellIndex, PauliCode};
use crate::decoy::Basis;
use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Overlap magnitude below which a result no longer identifies a Bell state.
pub const OVERLAP_TOLERANCE: f64 = 1e-9;

/// Norm drift allowed after oracle operations.
pub const NORM_TOLERANCE: f64 = 1e-12;

type Matrix2 = [[Complex64; 2]; 2];

/// A normalized two-qubit state as four computational-basis amplitudes.
/// The first tensor factor is Bob's half, the second Charlie's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseState {
    pub amps: [Complex64; 4],
}

impl DenseState {
    /// Amplitude vector of a Bell state.
    pub fn bell(state: BellIndex) -> Self {
        let mut amps = [Complex64::ZERO; 4];
        let sign = if state.z_bit {
            -FRAC_1_SQRT_2
        } else {
            FRAC_1_SQRT_2
        };
        if state.x_bit {
            // (|01> +- |10>) / sqrt(2)
            amps[0b01] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[0b10] = Complex64::new(sign, 0.0);
        } else {
            // (|00> +- |11>) / sqrt(2)
            amps[0b00] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[0b11] = Complex64::new(sign, 0.0);
        }
        DenseState { amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |<self|other>|.
    pub fn overlap_magnitude(&self, other: &DenseState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Apply `on_bob (x) on_charlie` to the state.
    pub fn apply_local(&self, on_bob: &Matrix2, on_charlie: &Matrix2) -> Self {
        let mut amps = [Complex64::ZERO; 4];
        for (out, amp) in amps.iter_mut().enumerate() {
            let (ob, oc) = (out >> 1, out & 1);
            for input in 0..4 {
                let (ib, ic) = (input >> 1, input & 1);
                *amp += on_bob[ob][ib] * on_charlie[oc][ic] * self.amps[input];
            }
        }
        DenseState { amps }
    }

    /// Decompose into Bell-basis probabilities |<bell_i|self>|^2.
    ///
    /// Also accepts sub-normalized states, in which case the entries sum to
    /// the state's squared norm instead of 1.
    pub fn bell_probabilities(&self) -> [f64; 4] {
        let mut probs = [0.0; 4];
        for (i, p) in probs.iter_mut().enumerate() {
            let b = DenseState::bell(BellIndex::from_index(i));
            *p = b.overlap_magnitude(self).powi(2);
        }
        probs
    }
}

/// The 2x2 matrix of an encoding operation: identity, sigma_z, sigma_x or
/// i*sigma_y for the codes 00, 01, 10, 11 respectively.
pub fn pauli_matrix(code: PauliCode) -> Matrix2 {
    let zero = Complex64::ZERO;
    let one = Complex64::ONE;
    let neg = -one;
    match (code.x, code.z) {
        (false, false) => [[one, zero], [zero, one]],
        (false, true) => [[one, zero], [zero, neg]],
        (true, false) => [[zero, one], [one, zero]],
        // i*sigma_y = [[0, 1], [-1, 0]]
        (true, true) => [[zero, one], [neg, zero]],
    }
}

/// Apply two encoding matrices to a Bell state and identify the result.
///
/// Returns the unique Bell state whose overlap magnitude with the resulting
/// amplitude vector is 1, together with that magnitude. A magnitude below
/// `1 - OVERLAP_TOLERANCE` on every Bell vector means the 4x4 product left
/// the Bell manifold, which indicates a corrupted matrix table.
pub fn dense_oracle_apply(
    code_b: PauliCode,
    code_c: PauliCode,
    state: BellIndex,
) -> Result<(BellIndex, f64)> {
    let result = DenseState::bell(state).apply_local(&pauli_matrix(code_b), &pauli_matrix(code_c));
    if (result.norm() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::internal(format!(
            "oracle state norm drifted to {} for codes ({code_b}, {code_c}) on {state}",
            result.norm()
        )));
    }
    let mut best: Option<(BellIndex, f64)> = None;
    for candidate in BellIndex::ALL {
        let mag = DenseState::bell(candidate).overlap_magnitude(&result);
        if best.is_none_or(|(_, m)| mag > m) {
            best = Some((candidate, mag));
        }
    }
    let (index, magnitude) = best.expect("four candidates were scanned");
    if magnitude < 1.0 - OVERLAP_TOLERANCE {
        return Err(Error::internal(format!(
            "no Bell state matches the oracle result for codes ({code_b}, {code_c}) on {state}; \
             best overlap {magnitude}"
        )));
    }
    Ok((index, magnitude))
}

/// Bell-measurement distribution after one half of a pair is measured and
/// resent in the given basis (the intercept-resend disturbance).
///
/// Sums, over both measurement branches, the branch probability times the
/// Bell decomposition of the collapsed state. Used to validate the symbolic
/// disturbance rule in [`crate::decoy`].
pub fn intercept_distribution(state: BellIndex, basis: Basis) -> [f64; 4] {
    let v = DenseState::bell(state);
    let zero = Complex64::ZERO;
    let one = Complex64::ONE;
    let identity = [[one, zero], [zero, one]];
    // Rank-1 projectors onto the basis states of the measured (Bob) qubit.
    let projectors: [Matrix2; 2] = match basis {
        Basis::Z => [[[one, zero], [zero, zero]], [[zero, zero], [zero, one]]],
        Basis::X => {
            let h = Complex64::new(0.5, 0.0);
            let nh = -h;
            [[[h, h], [h, h]], [[h, nh], [nh, h]]]
        }
    };
    let mut probs = [0.0; 4];
    for projector in &projectors {
        // Unnormalized branch: |<bell|P psi>|^2 already carries the branch weight.
        let branch = v.apply_local(projector, &identity);
        let branch_probs = branch.bell_probabilities();
        for (acc, p) in probs.iter_mut().zip(branch_probs) {
            *acc += p;
        }
    }
    probs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::combined_action;

    #[test]
    fn bell_vectors_are_normalized_and_orthogonal() {
        for a in BellIndex::ALL {
            for b in BellIndex::ALL {
                let overlap = DenseState::bell(a).overlap_magnitude(&DenseState::bell(b));
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (overlap - expected).abs() < NORM_TOLERANCE,
                    "{a} vs {b}: {overlap}"
                );
            }
        }
    }

    #[test]
    fn oracle_identity_example() {
        let (state, mag) = dense_oracle_apply(
            PauliCode::new(false, false),
            PauliCode::new(false, false),
            BellIndex::PHI_PLUS,
        )
        .unwrap();
        assert_eq!(state, BellIndex::PHI_PLUS);
        assert!((mag - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn oracle_bit_flip_example() {
        let (state, mag) = dense_oracle_apply(
            PauliCode::new(true, false),
            PauliCode::new(false, false),
            BellIndex::PHI_PLUS,
        )
        .unwrap();
        assert_eq!(state, BellIndex::PSI_PLUS);
        assert!((mag - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn oracle_agrees_with_symbolic_rule_on_all_64_cases() {
        for code_b in PauliCode::ALL {
            for code_c in PauliCode::ALL {
                for state in BellIndex::ALL {
                    let (dense, mag) = dense_oracle_apply(code_b, code_c, state).unwrap();
                    assert_eq!(dense, combined_action(code_b, code_c, state));
                    assert!((mag - 1.0).abs() < NORM_TOLERANCE);
                }
            }
        }
    }

    #[test]
    fn intercept_distribution_splits_the_phase_bit_under_z() {
        // Measuring one half of phi+ in Z leaves an even phi+/phi- mixture.
        let probs = intercept_distribution(BellIndex::PHI_PLUS, Basis::Z);
        assert!((probs[BellIndex::PHI_PLUS.index()] - 0.5).abs() < NORM_TOLERANCE);
        assert!((probs[BellIndex::PHI_MINUS.index()] - 0.5).abs() < NORM_TOLERANCE);
        assert!(probs[BellIndex::PSI_PLUS.index()].abs() < NORM_TOLERANCE);
        assert!(probs[BellIndex::PSI_MINUS.index()].abs() < NORM_TOLERANCE);
    }

    #[test]
    fn intercept_distribution_splits_the_flip_bit_under_x() {
        let probs = intercept_distribution(BellIndex::PHI_PLUS, Basis::X);
        assert!((probs[BellIndex::PHI_PLUS.index()] - 0.5).abs() < NORM_TOLERANCE);
        assert!((probs[BellIndex::PSI_PLUS.index()] - 0.5).abs() < NORM_TOLERANCE);
        assert!(probs[BellIndex::PHI_MINUS.index()].abs() < NORM_TOLERANCE);
        assert!(probs[BellIndex::PSI_MINUS.index()].abs() < NORM_TOLERANCE);
    }
}
