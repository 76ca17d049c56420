//! Successive-cancellation and belief-propagation decoders for polar codes,
//! plus the erasure peeling decoder used to cross-check BP on the BEC.

mod bp;
pub(crate) mod llr;
mod peel;
mod sc;

pub use bp::{bp_decode, BpDecoder, BpOptions, StageOrder, DEFAULT_MAX_ITER};
pub(crate) use llr::expo;
pub use llr::{boxplus, Quantizer};
pub use peel::{peel_fixpoint, Peeler};
pub use sc::sc_decode;

/// Outcome of decoding one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// One entry per information bit; `None` marks an erasure.
    pub info_estimate: Vec<Option<u8>>,
    pub iterations_used: usize,
    /// BEC: every information bit resolved. AWGN: the decisions form a
    /// codeword consistent with the posterior hard decisions.
    pub converged: bool,
    /// BEC BP only: variable ids left unresolved, sorted.
    pub unresolved: Vec<usize>,
}

impl DecodeResult {
    pub fn erasures(&self) -> usize {
        self.info_estimate.iter().filter(|b| b.is_none()).count()
    }

    /// Positions that differ from `truth`; erasures count as errors.
    pub fn bit_errors(&self, truth: &[u8]) -> usize {
        self.info_estimate
            .iter()
            .zip(truth)
            .filter(|(est, &t)| **est != Some(t & 1))
            .count()
    }

    /// Hard decisions with erasures mapped to 0.
    pub fn hard_bits(&self) -> Vec<u8> {
        self.info_estimate.iter().map(|b| b.unwrap_or(0)).collect()
    }
}
