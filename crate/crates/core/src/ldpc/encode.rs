use super::ParityCheckMatrix;
use crate::error::{Error, Result};

type Row = Vec<u64>;

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn dense_rows(n_l: usize, rows: &[Vec<usize>]) -> Vec<Row> {
    rows.iter()
        .map(|cols| {
            let mut r = vec![0u64; words(n_l)];
            for &c in cols {
                r[c / 64] |= 1 << (c % 64);
            }
            r
        })
        .collect()
}

#[inline]
fn bit(row: &[u64], c: usize) -> bool {
    row[c / 64] >> (c % 64) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Gauss-Jordan elimination with pivots taken from the rightmost columns
/// first. Returns the pivot column of each of the first `rank` rows.
fn reduce(n_l: usize, m: &mut [Row], full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    for c in (0..n_l).rev() {
        let rank = pivots.len();
        if rank == m.len() {
            break;
        }
        let Some(p) = (rank..m.len()).find(|&r| bit(&m[r], c)) else {
            continue;
        };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank);
        let (pivot_row, below) = tail.split_first_mut().expect("rank < rows");
        for r in below.iter_mut().filter(|r| bit(r, c)) {
            xor_into(r, pivot_row);
        }
        if full {
            for r in head.iter_mut().filter(|r| bit(r, c)) {
                xor_into(r, pivot_row);
            }
        }
        pivots.push(c);
    }
    pivots
}

pub(crate) fn gf2_rank(n_l: usize, rows: &[Vec<usize>]) -> usize {
    reduce(n_l, &mut dense_rows(n_l, rows), false).len()
}

/// Systematic encoder built from the reduced row echelon form of `H`.
///
/// Information bits are placed at the non-pivot columns in increasing
/// order; each pivot column holds the parity fixed by its reduced row.
#[derive(Debug, Clone)]
pub struct LdpcEncoder {
    n_l: usize,
    info_positions: Vec<usize>,
    pivots: Vec<usize>,
    reduced: Vec<Row>,
}

impl LdpcEncoder {
    pub fn new(h: &ParityCheckMatrix) -> Result<Self> {
        let n_l = h.n_l();
        let mut reduced = dense_rows(n_l, h.rows());
        let pivots = reduce(n_l, &mut reduced, true);
        if pivots.len() < h.m() {
            return Err(Error::RankDeficient {
                rank: pivots.len(),
                rows: h.m(),
            });
        }
        let mut is_pivot = vec![false; n_l];
        pivots.iter().for_each(|&p| is_pivot[p] = true);
        Ok(LdpcEncoder {
            n_l,
            info_positions: (0..n_l).filter(|&c| !is_pivot[c]).collect(),
            pivots,
            reduced,
        })
    }

    pub fn k_l(&self) -> usize {
        self.info_positions.len()
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    /// Codeword positions that carry the information bits, in order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k_l() {
            return Err(Error::LengthMismatch {
                expected: self.k_l(),
                actual: info.len(),
            });
        }
        let mut x = vec![0u64; words(self.n_l)];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            x[pos / 64] |= u64::from(b & 1) << (pos % 64);
        }
        let mut word = vec![0u8; self.n_l];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            word[pos] = b & 1;
        }
        for (row, &p) in self.reduced.iter().zip(&self.pivots) {
            let parity: u32 = row.iter().zip(&x).map(|(r, v)| (r & v).count_ones()).sum();
            word[p] = (parity & 1) as u8;
        }
        Ok(word)
    }

    /// Reads the information bits back out of a codeword.
    pub fn extract(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| word[p]).collect()
    }
}

/// Systematic encoding of one block. Builds the encoder each call; keep an
/// [`LdpcEncoder`] when encoding many blocks.
pub fn ldpc_encode(h: &ParityCheckMatrix, info: &[u8]) -> Result<Vec<u8>> {
    LdpcEncoder::new(h)?.encode(info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hamming() -> ParityCheckMatrix {
        ParityCheckMatrix::from_rows(
            7,
            vec![vec![0, 1, 2, 4], vec![1, 2, 3, 5], vec![0, 2, 3, 6]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn hamming_codewords() {
        let enc = LdpcEncoder::new(&hamming()).unwrap();
        assert_eq!(enc.k_l(), 4);
        let mut words = std::collections::BTreeSet::new();
        for m in 0..16u8 {
            let info: Vec<u8> = (0..4).map(|i| m >> i & 1).collect();
            let w = enc.encode(&info).unwrap();
            assert!(hamming().syndrome_ok(&w));
            assert_eq!(enc.extract(&w), info);
            words.insert(w);
        }
        assert_eq!(words.len(), 16);
        assert!(enc.encode(&[0; 3]).is_err());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let h = ParityCheckMatrix::from_rows(4, vec![vec![0, 1], vec![1, 2], vec![0, 2]], None)
            .unwrap();
        assert_eq!(h.rank(), 2);
        assert_eq!(h.k_l(), 2);
        assert!(matches!(
            LdpcEncoder::new(&h),
            Err(Error::RankDeficient { rank: 2, rows: 3 })
        ));
    }

    proptest! {
        #[test]
        fn random_matrices_encode_into_the_kernel(
            rows in proptest::collection::vec(proptest::collection::btree_set(0usize..70, 1..12), 1..20),
            seed in any::<u64>(),
        ) {
            let rows: Vec<Vec<usize>> = rows.into_iter().map(|r| r.into_iter().collect()).collect();
            let h = ParityCheckMatrix::from_rows(70, rows, None).unwrap();
            match LdpcEncoder::new(&h) {
                Ok(enc) => {
                    prop_assert_eq!(enc.k_l(), h.k_l());
                    let info: Vec<u8> = (0..enc.k_l()).map(|i| (seed >> (i % 64) & 1) as u8).collect();
                    let w = enc.encode(&info).unwrap();
                    prop_assert!(h.syndrome_ok(&w));
                    prop_assert_eq!(enc.extract(&w), info);
                }
                Err(Error::RankDeficient { rank, .. }) => prop_assert_eq!(rank, h.rank()),
                Err(e) => panic!("{e}"),
            }
        }
    }
}
