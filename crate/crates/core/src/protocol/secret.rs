//! The players' shared secret and what they derive from it.
//!
//! Bob and Charlie obtain this value out of band (modeled as an ideal
//! exchange standing in for a QKD session). It determines where the
//! sampling pairs are inserted into the returned sequence and, in hardened
//! mode, the mask schedule. The third party never sees it.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::rng::{stream, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedSecret(u64);

impl SharedSecret {
    pub fn new(material: u64) -> Self {
        SharedSecret(material)
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    pub(crate) fn derivation_rng(&self, stream: u64) -> ChaCha8Rng {
        stream_rng(self.0, stream)
    }

    /// The secret insertion permutation: element `i` is the wire position of
    /// the pair originally at index `i`. Always a bijection of [0, n).
    pub fn permutation(&self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.derivation_rng(stream::SECRET_PERMUTATION));
        // order[p] = original index at wire position p; invert it.
        let mut wire_of = vec![0usize; n];
        for (position, &original) in order.iter().enumerate() {
            wire_of[original] = position;
        }
        wire_of
    }
}
