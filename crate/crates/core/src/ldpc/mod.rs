//! Irregular LDPC codes: degree distributions, PEG construction, alist I/O,
//! systematic encoding and flooding sum-product decoding.

mod alist;
mod decode;
mod encode;
mod peg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decode::{ldpc_bp_decode, LdpcDecoder, LdpcOutput};
pub use encode::{ldpc_encode, LdpcEncoder};
pub use peg::construct_peg;

/// Edge-perspective degree distribution pair `(λ, ρ)`.
///
/// Each list holds `(degree, fraction)` where `fraction` is the share of
/// edges attached to nodes of that degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub lambda_coeffs: Vec<(usize, f64)>,
    pub rho_coeffs: Vec<(usize, f64)>,
}

const SUM_TOL: f64 = 1e-9;

impl DegreeDistribution {
    pub fn new(lambda_coeffs: Vec<(usize, f64)>, rho_coeffs: Vec<(usize, f64)>) -> Result<Self> {
        for (name, list) in [("lambda", &lambda_coeffs), ("rho", &rho_coeffs)] {
            if list.is_empty() {
                return Err(Error::param(format!("{name} has no terms")));
            }
            let mut seen = std::collections::BTreeSet::new();
            for &(d, f) in list.iter() {
                if d < 2 {
                    return Err(Error::param(format!("{name} degree {d} is below 2")));
                }
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::param(format!("{name} fraction {f} for degree {d}")));
                }
                if !seen.insert(d) {
                    return Err(Error::param(format!("{name} repeats degree {d}")));
                }
            }
            let total: f64 = list.iter().map(|t| t.1).sum();
            if (total - 1.0).abs() > SUM_TOL {
                return Err(Error::param(format!("{name} fractions sum to {total}")));
            }
        }
        let mut lambda_coeffs = lambda_coeffs;
        let mut rho_coeffs = rho_coeffs;
        lambda_coeffs.sort_by_key(|t| t.0);
        rho_coeffs.sort_by_key(|t| t.0);
        Ok(DegreeDistribution {
            lambda_coeffs,
            rho_coeffs,
        })
    }

    /// The rate-0.93 pair with BP threshold 0.47 on the BI-AWGN channel.
    pub fn optical() -> Self {
        DegreeDistribution::new(
            vec![
                (2, 0.156935),
                (3, 0.138295),
                (4, 0.325131),
                (12, 0.168818),
                (13, 0.210821),
            ],
            vec![
                (35, 0.039239),
                (36, 0.144375),
                (71, 0.302308),
                (72, 0.514078),
            ],
        )
        .expect("coefficients sum to one")
    }

    /// `(dv, dc)`-regular pair.
    pub fn regular(dv: usize, dc: usize) -> Result<Self> {
        DegreeDistribution::new(vec![(dv, 1.0)], vec![(dc, 1.0)])
    }

    /// Keeps `λ` and replaces `ρ` by the check distribution concentrated on
    /// two consecutive degrees whose design rate is `rate`.
    pub fn with_concentrated_checks(&self, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::param(format!("rate {rate} outside (0, 1)")));
        }
        let avg = 1.0 / ((1.0 - rate) * integral(&self.lambda_coeffs));
        let d = avg.floor() as usize;
        if d < 2 {
            return Err(Error::param(format!(
                "average check degree {avg} is below 2"
            )));
        }
        let low_nodes = (d + 1) as f64 - avg;
        let rho_d = low_nodes * d as f64 / avg;
        let rho = if rho_d >= 1.0 - SUM_TOL {
            vec![(d, 1.0)]
        } else if rho_d <= SUM_TOL {
            vec![(d + 1, 1.0)]
        } else {
            vec![(d, rho_d), (d + 1, 1.0 - rho_d)]
        };
        DegreeDistribution::new(self.lambda_coeffs.clone(), rho)
    }

    /// `1 − ∫ρ / ∫λ`.
    pub fn design_rate(&self) -> f64 {
        1.0 - integral(&self.rho_coeffs) / integral(&self.lambda_coeffs)
    }

    /// Node-perspective fractions of the variable degrees.
    pub fn variable_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.lambda_coeffs)
    }

    /// Node-perspective fractions of the check degrees.
    pub fn check_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.rho_coeffs)
    }
}

/// `Σ f_d / d`, the integral of the edge polynomial over `[0, 1]`.
fn integral(coeffs: &[(usize, f64)]) -> f64 {
    coeffs.iter().map(|&(d, f)| f / d as f64).sum()
}

fn node_fractions(coeffs: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let total = integral(coeffs);
    coeffs
        .iter()
        .map(|&(d, f)| (d, f / d as f64 / total))
        .collect()
}

/// Sparse parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    /// Column indices of each check, sorted.
    rows: Vec<Vec<usize>>,
    /// Check indices of each code bit, sorted.
    cols: Vec<Vec<usize>>,
    n_l: usize,
    k_l: usize,
    /// PEG seed, when the matrix was constructed here.
    seed: Option<u64>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from its rows; the dimension is computed from the
    /// GF(2) rank.
    pub fn from_rows(n_l: usize, rows: Vec<Vec<usize>>, seed: Option<u64>) -> Result<Self> {
        if n_l == 0 || rows.is_empty() {
            return Err(Error::param(
                "parity-check matrix needs at least one row and column",
            ));
        }
        let mut cols = vec![Vec::new(); n_l];
        let mut rows = rows;
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(format!("row {r} repeats a column")));
            }
            for &c in row.iter() {
                if c >= n_l {
                    return Err(Error::IndexOutOfRange { index: c, len: n_l });
                }
                cols[c].push(r);
            }
        }
        let rank = encode::gf2_rank(n_l, &rows);
        Ok(ParityCheckMatrix {
            k_l: n_l - rank,
            rows,
            cols,
            n_l,
            seed,
        })
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    /// Code dimension `N_l − rank(H)`.
    pub fn k_l(&self) -> usize {
        self.k_l
    }

    /// Number of checks `M`.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rank(&self) -> usize {
        self.n_l - self.k_l
    }

    /// `K_l / N_l`.
    pub fn rate(&self) -> f64 {
        self.k_l as f64 / self.n_l as f64
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// True when every check of `word` is satisfied.
    pub fn syndrome_ok(&self, word: &[u8]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ (word[c] & 1)) == 0)
    }

    /// Empirical edge-perspective fractions `(λ, ρ)` of this matrix.
    pub fn edge_fractions(&self) -> DegreeDistribution {
        let edges = self.num_edges() as f64;
        let tally = |degrees: &mut dyn Iterator<Item = usize>| {
            let mut counts = std::collections::BTreeMap::new();
            for d in degrees {
                *counts.entry(d).or_insert(0usize) += d;
            }
            counts
                .into_iter()
                .map(|(d, e)| (d, e as f64 / edges))
                .collect::<Vec<_>>()
        };
        DegreeDistribution {
            lambda_coeffs: tally(&mut self.cols.iter().map(Vec::len)),
            rho_coeffs: tally(&mut self.rows.iter().map(Vec::len)),
        }
    }

    /// Tanner graph as adjacency lists: code bits first, then checks.
    pub fn tanner_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = self
            .cols
            .iter()
            .map(|checks| checks.iter().map(|&c| self.n_l + c).collect())
            .collect();
        adj.extend(self.rows.iter().cloned());
        adj
    }
}
