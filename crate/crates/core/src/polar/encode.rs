use super::{BitBlock, CodeSpec};
use crate::error::{Error, Result};

/// Weight of row `i` of `F^{⊗n}`: `2^popcount(i)`.
pub fn row_weight(i: usize, n: usize) -> Result<usize> {
    let len = 1usize << n;
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    Ok(1usize << i.count_ones())
}

/// Applies `x = u · F^{⊗n}` in place. The transform is an involution over
/// GF(2), so the same call inverts it.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = len / 2;
    while half >= 1 {
        for block in bits.chunks_exact_mut(2 * half) {
            let (top, bottom) = block.split_at_mut(half);
            for (t, b) in top.iter_mut().zip(bottom.iter()) {
                *t ^= *b;
            }
        }
        half /= 2;
    }
}

/// Polar-encodes `info_bits` (length `K`) into a length-`N` codeword.
pub fn encode(spec: &CodeSpec, info_bits: &[u8]) -> Result<BitBlock> {
    let mut u = spec.scatter(info_bits)?;
    polar_transform_in_place(&mut u);
    Ok(BitBlock(u))
}
