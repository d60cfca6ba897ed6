//! Binary strings as exchanged on the classical side of the protocol.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::PauliCode;
use crate::error::Error;

/// An ordered bit string, e.g. a player's secret or its digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn empty() -> Self {
        Bits(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Uniformly random bit string of the given length.
    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        Bits((0..len).map(|_| rng.gen_bool(0.5)).collect())
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len(), other.len(), "xor of unequal-length bit strings");
        Bits(self.0.iter().zip(&other.0).map(|(&a, &b)| a ^ b).collect())
    }

    /// Split an even-length bit string into two-bit encoding blocks.
    pub fn blocks(&self) -> Vec<PauliCode> {
        assert!(
            self.len().is_multiple_of(2),
            "blocks() requires an even length"
        );
        self.0
            .chunks(2)
            .map(|c| PauliCode::new(c[0], c[1]))
            .collect()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::input(format!(
                    "bit string may contain only '0' and '1', found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bits)
    }
}
