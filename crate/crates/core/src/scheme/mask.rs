use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StarProductScheme;
use crate::rng::{self, Stream};

/// Code the servers' shared mask is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskingCode {
    /// `C★D_Q` (default): annihilated by the decoder's parity checks and
    /// large enough to hide the undesired files.
    StarProduct,
    /// The storage code `C ⊂ C★D_Q`.
    Storage,
}

/// Shared server randomness: one codeword of the masking code per iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskState {
    pub code: MaskingCode,
    /// `segments[s][j]` is added to server `j`'s answer in iteration `s`.
    pub segments: Vec<Vec<u64>>,
    /// Independent uniform symbols consumed, `β · dim(masking code)`.
    pub secrecy_symbols: usize,
}

impl MaskState {
    /// The `β` mask symbols of `server`.
    pub fn share(&self, server: usize) -> Vec<u64> {
        self.segments.iter().map(|seg| seg[server]).collect()
    }

    /// The mask as a `1 × βn` row in query column order.
    pub fn row(&self) -> Vec<u64> {
        let n = self.segments.first().map_or(0, |s| s.len());
        (0..n).flat_map(|j| self.share(j)).collect()
    }
}

impl StarProductScheme {
    pub fn sample_mask<R: Rng + ?Sized>(&self, rng: &mut R) -> MaskState {
        let code = self.mask_code();
        let f = self.field;
        let segments = (0..self.params.beta)
            .map(|_| {
                let msg = rng::vector(rng, f, code.dimension());
                code.encode(&msg).expect("message length matches dimension")
            })
            .collect();
        MaskState {
            code: self.masking,
            segments,
            secrecy_symbols: self.params.beta * code.dimension(),
        }
    }

    /// Mask drawn from the `Mask` stream of `seed`.
    pub fn apply_symmetric_mask(&self, seed: u64) -> MaskState {
        self.sample_mask(&mut rng::stream(seed, Stream::Mask))
    }
}
