//! Polar code parameters, reliability-based construction and the
//! O(N log N) butterfly encoder for the kernel `F = [[1,0],[1,1]]`.
//!
//! Indices are 0-based throughout. Bit `i` of the input vector `u` maps to
//! row `i` of `F^{⊗n}`, whose weight is `2^popcount(i)`. The 1-based
//! numbering used in most of the literature is `i + 1`.

mod construct;
mod encode;
mod spec_file;

pub use construct::{
    awgn_reliability, bhattacharyya, bhattacharyya_bec, select_info_set, select_info_set_new_rule,
    NewRuleReport, ReliabilityProfile, ReliabilitySource, DEFAULT_AWGN_BUDGET,
};
pub use encode::{encode, polar_transform_in_place, row_weight};
pub use spec_file::{CodeSpecFile, ConstructionRule};

use crate::error::{Error, Result};

/// Largest supported graph depth. Keeps node ids inside `u32`.
pub const MAX_DEPTH: usize = 24;

/// A polar code of length `N = 2^n` with information set `info_set`.
///
/// Frozen positions are the complement of `info_set` and carry 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
}

impl CodeSpec {
    /// Builds a spec from an arbitrary set of information indices.
    /// Duplicates are rejected, order is normalized.
    pub fn new(n: usize, info_set: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n > MAX_DEPTH {
            return Err(Error::param(format!("depth {n} exceeds {MAX_DEPTH}")));
        }
        let len = 1usize << n;
        let mut frozen = vec![true; len];
        let mut info: Vec<usize> = Vec::new();
        for i in info_set {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, len });
            }
            if !frozen[i] {
                return Err(Error::param(format!("duplicate information index {i}")));
            }
            frozen[i] = false;
            info.push(i);
        }
        info.sort_unstable();
        Ok(CodeSpec {
            n,
            info_set: info,
            frozen,
        })
    }

    /// Full-rate code: every input position carries information.
    pub fn full_rate(n: usize) -> Result<Self> {
        Self::new(n, 0..1usize << n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.info_set.is_empty()
    }

    /// Number of information bits `K`.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    /// Sorted information indices.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Sorted frozen indices.
    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frozen[i]).collect()
    }

    /// `true` at frozen positions.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Scatters `info_bits` into a length-`N` input vector `u`.
    pub fn scatter(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: info_bits.len(),
            });
        }
        let mut u = vec![0u8; self.len()];
        for (&pos, &b) in self.info_set.iter().zip(info_bits) {
            u[pos] = b & 1;
        }
        Ok(u)
    }

    /// Picks the information positions out of a length-`N` vector.
    pub fn gather<T: Copy>(&self, u: &[T]) -> Vec<T> {
        self.info_set.iter().map(|&i| u[i]).collect()
    }
}

/// A length-`N` vector of code bits (or input bits) over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitBlock(pub Vec<u8>);

impl BitBlock {
    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }
}

impl From<Vec<u8>> for BitBlock {
    fn from(bits: Vec<u8>) -> Self {
        BitBlock(bits)
    }
}
