//! Run configuration, input hashing and player inputs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};

/// How a player's raw secret is turned into the 2m-bit digest that gets
/// encoded onto the EPR pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashScheme {
    /// Raw input is already a 2m-bit digest; lengths must match.
    Identity,
    /// Length-prefixed XOR fold of arbitrary-length input into 2m bits,
    /// followed by one rotate-and-xor mixing pass. A stand-in for a real
    /// hash; collision behavior is out of scope.
    ToyDigest,
}

impl fmt::Display for HashScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HashScheme::Identity => "identity",
            HashScheme::ToyDigest => "toy-digest",
        };
        f.write_str(s)
    }
}

impl FromStr for HashScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(HashScheme::Identity),
            "toy-digest" => Ok(HashScheme::ToyDigest),
            other => Err(Error::input(format!(
                "unknown hash scheme {other:?} (expected identity or toy-digest)"
            ))),
        }
    }
}

/// Digest a raw input into exactly `2m` bits under the given scheme.
pub fn hash_input(raw: &Bits, scheme: HashScheme, m: usize) -> Result<Bits> {
    if m == 0 {
        return Err(Error::input("digests need at least one two-bit block (m >= 1)"));
    }
    let width = 2 * m;
    match scheme {
        HashScheme::Identity => {
            if raw.len() != width {
                return Err(Error::input(format!(
                    "identity hashing requires a {width}-bit input, got {} bits",
                    raw.len()
                )));
            }
            Ok(raw.clone())
        }
        HashScheme::ToyDigest => {
            let mut acc = vec![false; width];
            // 64 length bits, then the raw bits, folded into the accumulator.
            let length_bits = (0..64).map(|i| (raw.len() as u64 >> (63 - i)) & 1 == 1);
            for (i, bit) in length_bits
                .chain(raw.as_slice().iter().copied())
                .enumerate()
            {
                acc[i % width] ^= bit;
            }
            let mixed: Vec<bool> = (0..width).map(|i| acc[i] ^ acc[(i + 1) % width]).collect();
            Ok(Bits::new(mixed))
        }
    }
}

/// One player's secret and its digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerInput {
    pub raw: Bits,
    pub digest: Bits,
}

impl PlayerInput {
    pub fn new(raw: Bits, scheme: HashScheme, m: usize) -> Result<Self> {
        let digest = hash_input(&raw, scheme, m)?;
        Ok(PlayerInput { raw, digest })
    }
}

/// Parameters of a single protocol run.
///
/// `n` EPR pairs total; the first `m` (in original order) carry the digest
/// blocks and the remaining `k = n - m` are the sampling pairs used to catch
/// a third party publishing false outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: usize,
    pub m: usize,
    pub decoys_per_transmission: usize,
    /// Decoy error rate above which a transmission aborts the run.
    pub decoy_threshold: f64,
    /// Sampling-pair inconsistency rate above which the third party is
    /// indicted. 0 means any inconsistency aborts.
    pub tp_inconsistency_threshold: f64,
    pub hash_scheme: HashScheme,
    /// Mask the sampling pairs with secret encodings (the countermeasure).
    pub hardened: bool,
    pub seed: u64,
    /// Fix the players' shared secret instead of deriving it from `seed`.
    /// The secret drives the insertion permutation and, when hardened, the
    /// mask schedule; it is never visible to the third party.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shared_secret_override: Option<u64>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            n: 8,
            m: 4,
            decoys_per_transmission: 8,
            decoy_threshold: 0.05,
            tp_inconsistency_threshold: 0.0,
            hash_scheme: HashScheme::Identity,
            hardened: false,
            seed: 0,
            shared_secret_override: None,
        }
    }
}

impl ProtocolConfig {
    /// Number of sampling pairs.
    pub fn k(&self) -> usize {
        self.n - self.m
    }

    /// Digest bit length carried by the encoded pairs.
    pub fn digest_len(&self) -> usize {
        2 * self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::input(
                "at least one encoded pair is required (m >= 1)",
            ));
        }
        if self.n <= self.m {
            return Err(Error::input(format!(
                "need more pairs than digest blocks (n > m, got n={}, m={})",
                self.n, self.m
            )));
        }
        for (name, value) in [
            ("decoy_threshold", self.decoy_threshold),
            (
                "tp_inconsistency_threshold",
                self.tp_inconsistency_threshold,
            ),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::input(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_passes_matching_length_through() {
        let raw: Bits = "00011011".parse().unwrap();
        assert_eq!(hash_input(&raw, HashScheme::Identity, 4).unwrap(), raw);
    }

    #[test]
    fn identity_rejects_wrong_length() {
        let raw: Bits = "0001".parse().unwrap();
        assert!(matches!(
            hash_input(&raw, HashScheme::Identity, 4),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn hashing_rejects_zero_blocks() {
        let raw: Bits = "01".parse().unwrap();
        assert!(hash_input(&raw, HashScheme::ToyDigest, 0).is_err());
        assert!(hash_input(&raw, HashScheme::Identity, 0).is_err());
    }

    #[test]
    fn toy_digest_is_deterministic_and_sized() {
        let raw: Bits = "110100111".parse().unwrap();
        let a = hash_input(&raw, HashScheme::ToyDigest, 4).unwrap();
        let b = hash_input(&raw, HashScheme::ToyDigest, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
    }

    #[test]
    fn toy_digest_distinguishes_lengths() {
        // Same folded content, different lengths: the length prefix separates them.
        let short: Bits = "".parse().unwrap();
        let longer: Bits = "00000000".parse().unwrap();
        let a = hash_input(&short, HashScheme::ToyDigest, 4).unwrap();
        let b = hash_input(&longer, HashScheme::ToyDigest, 4).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn player_input_carries_raw_and_digest() {
        let raw: Bits = "110100111".parse().unwrap();
        let input = PlayerInput::new(raw.clone(), HashScheme::ToyDigest, 4).unwrap();
        assert_eq!(input.raw, raw);
        assert_eq!(
            input.digest,
            hash_input(&raw, HashScheme::ToyDigest, 4).unwrap()
        );
        assert!(PlayerInput::new(raw, HashScheme::Identity, 4).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ProtocolConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.k(), 4);
        assert_eq!(cfg.digest_len(), 8);

        cfg.m = 8;
        assert!(cfg.validate().is_err()); // n must exceed m

        cfg.m = 0;
        assert!(cfg.validate().is_err());

        let cfg = ProtocolConfig {
            decoy_threshold: 1.5,
            ..ProtocolConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
