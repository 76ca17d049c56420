use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{encode::row_weight, CodeSpec};
use crate::decoders::boxplus;
use crate::error::{Error, Result};
use crate::seeding::{frame_rng, Stream};

/// Default number of Monte Carlo frames for [`awgn_reliability`].
pub const DEFAULT_AWGN_BUDGET: usize = 100_000;

/// Where a reliability profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReliabilitySource {
    /// Bhattacharyya recursion seeded with `z0` (the erasure probability
    /// for a BEC).
    Bhattacharyya { z0: f64 },
    /// Genie-aided SC Monte Carlo estimate on BI-AWGN.
    AwgnGenie {
        sigma: f64,
        budget: usize,
        seed: u64,
    },
}

/// Per-bit-channel quality scores. Smaller is better.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    pub values: Vec<f64>,
    pub source: ReliabilitySource,
}

impl ReliabilityProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    /// Indices from best to worst: smaller score first, larger index on ties.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[a]
                .total_cmp(&self.values[b])
                .then_with(|| b.cmp(&a))
        });
        order
    }
}

/// Bhattacharyya parameters of the `2^n` synthesized channels for a BEC(ε).
pub fn bhattacharyya_bec(epsilon: f64, n: usize) -> Result<ReliabilityProfile> {
    bhattacharyya(epsilon, n)
}

/// Bhattacharyya recursion from an arbitrary base parameter `z0 ∈ [0, 1]`.
///
/// The upper half of `u` (most significant index bit 0) sees the degraded
/// channel `2z − z²`, the lower half the upgraded channel `z²`, recursively.
/// Exact for the BEC; an upper bound on the error probability otherwise.
pub fn bhattacharyya(z0: f64, n: usize) -> Result<ReliabilityProfile> {
    if !(0.0..=1.0).contains(&z0) {
        return Err(Error::param(format!(
            "Bhattacharyya parameter {z0} not in [0, 1]"
        )));
    }
    let mut z = vec![z0];
    for _ in 0..n {
        z = (0..2 * z.len())
            .map(|k| {
                let parent = z[k >> 1];
                if k & 1 == 0 {
                    2.0 * parent - parent * parent
                } else {
                    parent * parent
                }
            })
            .collect();
    }
    Ok(ReliabilityProfile {
        values: z,
        source: ReliabilitySource::Bhattacharyya { z0 },
    })
}

/// Estimates the bit-channel error probabilities of a BI-AWGN(σ) channel
/// with genie-aided SC decoding of the all-zero codeword.
///
/// A decision LLR below zero counts as an error, an exact zero as half an
/// error. Results are reproducible for a given `(sigma, n, budget, seed)`.
pub fn awgn_reliability(
    sigma: f64,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<ReliabilityProfile> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::param(format!(
            "noise std-dev must be positive, got {sigma}"
        )));
    }
    if budget == 0 {
        return Err(Error::param("Monte Carlo budget must be positive"));
    }
    let len = 1usize << n;
    const CHUNK: usize = 256;
    let chunks = budget.div_ceil(CHUNK);

    // Half-error units so that ties can be accumulated exactly.
    let halves = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; len];
            let mut llr = vec![0.0; len];
            let mut out = vec![0.0; len];
            let mut scratch = vec![0.0; len];
            let frames = (c * CHUNK..((c + 1) * CHUNK).min(budget)).len();
            for f in 0..frames {
                let mut rng = frame_rng(seed, Stream::Construction, 0, (c * CHUNK + f) as u64);
                for l in llr.iter_mut() {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    *l = 2.0 * (1.0 + sigma * noise) / (sigma * sigma);
                }
                genie_sc(&llr, &mut out, &mut scratch);
                for (cnt, &v) in counts.iter_mut().zip(out.iter()) {
                    if v < 0.0 {
                        *cnt += 2;
                    } else if v == 0.0 {
                        *cnt += 1;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let values = halves
        .into_iter()
        .map(|h| h as f64 / (2.0 * budget as f64))
        .collect();
    Ok(ReliabilityProfile {
        values,
        source: ReliabilitySource::AwgnGenie {
            sigma,
            budget,
            seed,
        },
    })
}

/// Decision LLRs of every input bit when all earlier bits are revealed as 0.
fn genie_sc(llr: &[f64], out: &mut [f64], scratch: &mut [f64]) {
    let len = llr.len();
    if len == 1 {
        out[0] = llr[0];
        return;
    }
    let half = len / 2;
    let (a, b) = llr.split_at(half);
    let (s_lo, s_hi) = scratch.split_at_mut(half);
    let (o_lo, o_hi) = out.split_at_mut(half);
    for j in 0..half {
        s_lo[j] = boxplus(a[j], b[j]);
    }
    genie_sc(s_lo, o_lo, s_hi);
    for j in 0..half {
        s_lo[j] = a[j] + b[j];
    }
    genie_sc(s_lo, o_hi, s_hi);
}

/// Standard construction: the `k` positions with the best scores.
pub fn select_info_set(profile: &ReliabilityProfile, k: usize) -> Result<CodeSpec> {
    let len = profile.len();
    if !len.is_power_of_two() {
        return Err(Error::param(format!(
            "profile length {len} is not a power of two"
        )));
    }
    if k > len {
        return Err(Error::param(format!("K = {k} exceeds N = {len}")));
    }
    CodeSpec::new(profile.depth(), profile.ranking().into_iter().take(k))
}

/// Outcome of the leaf-set-constrained construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewRuleReport {
    /// `(removed, added)` pairs, in the order they were applied.
    pub swaps: Vec<(usize, usize)>,
    /// Information indices below the threshold that could not be replaced.
    pub shortfall: Vec<usize>,
}

/// Standard construction followed by swapping every information bit whose
/// row weight is below `leaf_threshold` for the most reliable frozen bit
/// whose row weight reaches it.
///
/// Deficient indices are processed in increasing row-weight order (worst
/// score first within a weight class). When candidates run out, the
/// remaining deficient indices stay and are listed in the report.
pub fn select_info_set_new_rule(
    profile: &ReliabilityProfile,
    k: usize,
    leaf_threshold: usize,
) -> Result<(CodeSpec, NewRuleReport)> {
    if !leaf_threshold.is_power_of_two() {
        return Err(Error::param(format!(
            "leaf threshold {leaf_threshold} is not a power of two"
        )));
    }
    let standard = select_info_set(profile, k)?;
    let n = standard.n();
    let weight = |i: usize| row_weight(i, n).expect("index within block");
    let scores = &profile.values;

    let mut deficient: Vec<usize> = standard
        .info_set()
        .iter()
        .copied()
        .filter(|&i| weight(i) < leaf_threshold)
        .collect();
    deficient.sort_by(|&a, &b| {
        weight(a)
            .cmp(&weight(b))
            .then_with(|| scores[b].total_cmp(&scores[a]))
            .then_with(|| a.cmp(&b))
    });

    let candidates: Vec<usize> = profile
        .ranking()
        .into_iter()
        .filter(|&i| standard.is_frozen(i) && weight(i) >= leaf_threshold)
        .collect();

    let swaps: Vec<(usize, usize)> = deficient
        .iter()
        .copied()
        .zip(candidates.iter().copied())
        .collect();
    let shortfall = deficient[swaps.len()..].to_vec();

    let mut info: Vec<usize> = standard.info_set().to_vec();
    for &(removed, added) in &swaps {
        let pos = info
            .iter()
            .position(|&i| i == removed)
            .expect("removed index present");
        info[pos] = added;
    }
    let spec = CodeSpec::new(n, info)?;
    Ok((spec, NewRuleReport { swaps, shortfall }))
}
