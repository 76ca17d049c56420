//! Per-frame random streams.
//!
//! Every simulated frame draws from its own generator keyed by
//! `sha256(master, stream, grid index, frame index)`, so results do not
//! depend on how frames are distributed over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Independent uses of the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Stream {
    Construction = 1,
    Info = 2,
    Channel = 3,
    Peg = 4,
}

pub fn frame_seed(master: u64, stream: Stream, grid: u64, frame: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update([stream as u8]);
    h.update(grid.to_le_bytes());
    h.update(frame.to_le_bytes());
    h.finalize().into()
}

pub fn frame_rng(master: u64, stream: Stream, grid: u64, frame: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(frame_seed(master, stream, grid, frame))
}
