use super::ParityCheckMatrix;
use crate::decoders::expo;
use crate::error::{Error, Result};

/// Result of LDPC decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct LdpcOutput {
    /// Posterior LLR of every code bit.
    pub llr: Vec<f64>,
    pub hard: Vec<u8>,
    /// All checks satisfied by `hard`.
    pub converged: bool,
    pub iterations_used: usize,
}

/// Flooding sum-product decoder with reusable message storage.
///
/// Edges are numbered check by check. An iteration updates every check,
/// then every variable, then tests the syndrome of the posterior decisions.
#[derive(Debug, Clone)]
pub struct LdpcDecoder {
    n_l: usize,
    /// Edge range of each check.
    check_start: Vec<usize>,
    /// Variable of each edge.
    edge_var: Vec<usize>,
    /// Edges of each variable.
    var_edges: Vec<Vec<usize>>,
    /// Variable-to-check messages in the exponent domain.
    v2c: Vec<f64>,
    /// Check-to-variable LLRs.
    c2v: Vec<f64>,
    prefix: Vec<f64>,
}

impl LdpcDecoder {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let mut check_start = Vec::with_capacity(h.m() + 1);
        let mut edge_var = Vec::with_capacity(h.num_edges());
        let mut var_edges = vec![Vec::new(); h.n_l()];
        check_start.push(0);
        for row in h.rows() {
            for &v in row {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            check_start.push(edge_var.len());
        }
        let max_deg = h.rows().iter().map(Vec::len).max().unwrap_or(0);
        LdpcDecoder {
            n_l: h.n_l(),
            v2c: vec![0.0; edge_var.len()],
            c2v: vec![0.0; edge_var.len()],
            prefix: vec![0.0; max_deg + 1],
            check_start,
            edge_var,
            var_edges,
        }
    }

    pub fn decode(&mut self, llr_in: &[f64], max_iter: usize) -> Result<LdpcOutput> {
        if llr_in.len() != self.n_l {
            return Err(Error::LengthMismatch {
                expected: self.n_l,
                actual: llr_in.len(),
            });
        }
        if max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        for (e, &v) in self.edge_var.iter().enumerate() {
            self.v2c[e] = expo::from_llr(llr_in[v]);
        }
        let mut post = llr_in.to_vec();
        let mut hard = vec![0u8; self.n_l];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            iterations += 1;
            self.update_checks();
            for (v, edges) in self.var_edges.iter().enumerate() {
                let total = llr_in[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
                post[v] = total;
                hard[v] = (total < 0.0) as u8;
                for &e in edges {
                    self.v2c[e] = expo::from_llr(total - self.c2v[e]);
                }
            }
            converged = self.syndrome_ok(&hard);
            if converged {
                break;
            }
        }
        Ok(LdpcOutput {
            llr: post,
            hard,
            converged,
            iterations_used: iterations,
        })
    }

    /// Extrinsic check outputs by forward and backward partial products.
    fn update_checks(&mut self) {
        for w in self.check_start.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let msgs = &self.v2c[lo..hi];
            let prefix = &mut self.prefix[..=msgs.len()];
            prefix[0] = expo::FLOOR;
            for (i, &m) in msgs.iter().enumerate() {
                prefix[i + 1] = expo::check(prefix[i], m);
            }
            let mut suffix = expo::FLOOR;
            for i in (0..msgs.len()).rev() {
                self.c2v[lo + i] = expo::to_llr(expo::check(prefix[i], suffix));
                suffix = expo::check(suffix, msgs[i]);
            }
        }
    }

    fn syndrome_ok(&self, hard: &[u8]) -> bool {
        self.check_start.windows(2).all(|w| {
            self.edge_var[w[0]..w[1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ hard[v])
                == 0
        })
    }
}

/// Decodes one block. Builds the decoder each call; keep an
/// [`LdpcDecoder`] when decoding many blocks.
pub fn ldpc_bp_decode(
    h: &ParityCheckMatrix,
    llr_in: &[f64],
    max_iter: usize,
) -> Result<LdpcOutput> {
    LdpcDecoder::new(h).decode(llr_in, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::awgn_transmit;
    use crate::decoders::boxplus;
    use crate::ldpc::{construct_peg, DegreeDistribution, LdpcEncoder};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code() -> ParityCheckMatrix {
        construct_peg(&DegreeDistribution::regular(3, 6).unwrap(), 504, 0.5, 3).unwrap()
    }

    #[test]
    fn check_update_matches_tanh_rule() {
        let h = ParityCheckMatrix::from_rows(4, vec![vec![0, 1, 2, 3]], None).unwrap();
        let mut dec = LdpcDecoder::new(&h);
        let llr = [1.5, -0.7, 3.0, 0.2];
        let out = dec.decode(&llr, 1).unwrap();
        for v in 0..4 {
            let ext = (0..4)
                .filter(|&u| u != v)
                .fold(f64::INFINITY, |acc, u| boxplus(acc, llr[u]));
            assert!((out.llr[v] - llr[v] - ext).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_converges_in_one_iteration() {
        let h = code();
        let enc = LdpcEncoder::new(&h).unwrap();
        let mut dec = LdpcDecoder::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 0..100 {
            let info: Vec<u8> = (0..enc.k_l()).map(|_| rng.random_range(0..2)).collect();
            let x = enc.encode(&info).unwrap();
            let llr = awgn_transmit(&x, 1e-3, t).unwrap().to_llr();
            let out = dec.decode(&llr, 50).unwrap();
            assert!(out.converged);
            assert_eq!(out.iterations_used, 1);
            assert_eq!(enc.extract(&out.hard), info);
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let h = code();
        let out = ldpc_bp_decode(&h, &vec![0.0; h.n_l()], 10).unwrap();
        assert!(out.llr.iter().all(|&l| l == 0.0));
        assert!(out.converged);
    }

    #[test]
    fn negated_input_negates_output() {
        let h = code();
        let mut dec = LdpcDecoder::new(&h);
        let mut compared = 0;
        for t in 0..20 {
            let llr = awgn_transmit(&vec![0u8; h.n_l()], 1.6, t).unwrap().to_llr();
            let neg: Vec<f64> = llr.iter().map(|l| -l).collect();
            let a = dec.decode(&llr, 7).unwrap();
            let b = dec.decode(&neg, 7).unwrap();
            if a.iterations_used == b.iterations_used {
                for (x, y) in a.llr.iter().zip(&b.llr) {
                    assert_eq!(*x, -*y);
                }
                compared += 1;
            }
        }
        assert!(compared > 0);
    }

    #[test]
    fn rejects_bad_input() {
        let h = code();
        assert!(ldpc_bp_decode(&h, &[0.0; 3], 10).is_err());
        assert!(ldpc_bp_decode(&h, &vec![0.0; h.n_l()], 0).is_err());
    }
}
