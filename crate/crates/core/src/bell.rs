//! Phase-insensitive algebra of the four Bell states under local two-bit
//! Pauli encodings.
//!
//! A Bell state is tracked by two bits: a bit-flip component (phi vs. psi)
//! and a phase-flip component (+ vs. -). Applying one of the four encoding
//! operations to either half of an EPR pair toggles those components, up to
//! a global phase that no Bell-basis measurement can observe. The symbolic
//! rules here are cross-checked against a dense amplitude oracle in
//! [`crate::dense`].

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the four Bell states, identified by (bit-flip, phase-flip) bits.
///
/// Canonical mapping: (0,0) = phi+, (0,1) = phi-, (1,0) = psi+, (1,1) = psi-.
/// `Ord` follows the (x_bit, z_bit) pair so reports and witnesses are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BellIndex {
    pub x_bit: bool,
    pub z_bit: bool,
}

impl BellIndex {
    pub const PHI_PLUS: BellIndex = BellIndex {
        x_bit: false,
        z_bit: false,
    };
    pub const PHI_MINUS: BellIndex = BellIndex {
        x_bit: false,
        z_bit: true,
    };
    pub const PSI_PLUS: BellIndex = BellIndex {
        x_bit: true,
        z_bit: false,
    };
    pub const PSI_MINUS: BellIndex = BellIndex {
        x_bit: true,
        z_bit: true,
    };

    /// All four states in canonical order.
    pub const ALL: [BellIndex; 4] = [
        Self::PHI_PLUS,
        Self::PHI_MINUS,
        Self::PSI_PLUS,
        Self::PSI_MINUS,
    ];

    pub fn new(x_bit: bool, z_bit: bool) -> Self {
        BellIndex { x_bit, z_bit }
    }

    /// Canonical position 0..4, in the order phi+, phi-, psi+, psi-.
    pub fn index(self) -> usize {
        (self.x_bit as usize) << 1 | self.z_bit as usize
    }

    /// One-based label used for count-vector witnesses: 1 = phi+, .., 4 = psi-.
    pub fn ordinal(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.x_bit, self.z_bit) {
            (false, false) => "phi+",
            (false, true) => "phi-",
            (true, false) => "psi+",
            (true, true) => "psi-",
        };
        f.write_str(name)
    }
}

impl FromStr for BellIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "phi+" => Ok(Self::PHI_PLUS),
            "phi-" => Ok(Self::PHI_MINUS),
            "psi+" => Ok(Self::PSI_PLUS),
            "psi-" => Ok(Self::PSI_MINUS),
            other => Err(Error::input(format!(
                "unknown Bell state {other:?} (expected phi+, phi-, psi+ or psi-)"
            ))),
        }
    }
}

/// A two-bit encoding operation: (0,0) identity, (0,1) phase flip,
/// (1,0) bit flip, (1,1) both. Bijective with the two-bit blocks "00".."11".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PauliCode {
    pub x: bool,
    pub z: bool,
}

impl PauliCode {
    pub const IDENTITY: PauliCode = PauliCode { x: false, z: false };

    /// All four codes in block order "00", "01", "10", "11".
    pub const ALL: [PauliCode; 4] = [
        PauliCode { x: false, z: false },
        PauliCode { x: false, z: true },
        PauliCode { x: true, z: false },
        PauliCode { x: true, z: true },
    ];

    pub fn new(x: bool, z: bool) -> Self {
        PauliCode { x, z }
    }

    pub fn is_identity(self) -> bool {
        !self.x && !self.z
    }

    pub fn index(self) -> usize {
        (self.x as usize) << 1 | self.z as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }
}

impl BitXor for PauliCode {
    type Output = PauliCode;

    fn bitxor(self, rhs: PauliCode) -> PauliCode {
        PauliCode::new(self.x ^ rhs.x, self.z ^ rhs.z)
    }
}

impl fmt::Display for PauliCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.x as u8, self.z as u8)
    }
}

/// Which half of an EPR pair an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Bob,
    Charlie,
}

/// Map a two-bit block to its encoding operation: first bit -> x, second -> z.
pub fn encode_bits(block: &str) -> Result<PauliCode, Error> {
    let bytes = block.as_bytes();
    if bytes.len() != 2 {
        return Err(Error::input(format!(
            "encoding block must have exactly 2 bits, got {:?}",
            block
        )));
    }
    let bit = |b: u8| match b {
        b'0' => Ok(false),
        b'1' => Ok(true),
        _ => Err(Error::input(format!(
            "encoding block must be binary, got {:?}",
            block
        ))),
    };
    Ok(PauliCode::new(bit(bytes[0])?, bit(bytes[1])?))
}

/// Apply an encoding operation to one half of an EPR pair.
///
/// The resulting Bell state is (state.x ^ code.x, state.z ^ code.z) on either
/// side; the sides differ only by a global phase, which is discarded.
pub fn pauli_action(code: PauliCode, _side: Side, state: BellIndex) -> BellIndex {
    BellIndex::new(state.x_bit ^ code.x, state.z_bit ^ code.z)
}

/// Net effect of Bob's and Charlie's encodings on a shared pair.
///
/// Equals `pauli_action(code_c, Charlie, pauli_action(code_b, Bob, state))`;
/// in particular `combined_action(c, c, s) == s` for every code c, which is
/// why equal two-bit blocks leave the encoded Bell states unchanged.
pub fn combined_action(code_b: PauliCode, code_c: PauliCode, state: BellIndex) -> BellIndex {
    BellIndex::new(
        state.x_bit ^ code_b.x ^ code_c.x,
        state.z_bit ^ code_b.z ^ code_c.z,
    )
}

/// Recover the XOR of the two applied codes from an initial/measured pair:
/// `recover_xor(s, combined_action(u, v, s)) == u ^ v`.
pub fn recover_xor(initial: BellIndex, measured: BellIndex) -> PauliCode {
    PauliCode::new(
        initial.x_bit ^ measured.x_bit,
        initial.z_bit ^ measured.z_bit,
    )
}
