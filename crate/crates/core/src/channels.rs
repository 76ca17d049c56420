//! Binary erasure and BPSK/AWGN channel models.
//!
//! BPSK maps bit 0 to +1 and bit 1 to −1, so a positive LLR favours 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the receiver observes for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelOutput {
    /// BEC: `None` marks an erased position.
    Erasure {
        symbols: Vec<Option<u8>>,
        epsilon: f64,
    },
    /// BI-AWGN: channel LLRs `2y/σ²`.
    Llr { llr: Vec<f64>, sigma: f64 },
}

impl ChannelOutput {
    pub fn len(&self) -> usize {
        match self {
            ChannelOutput::Erasure { symbols, .. } => symbols.len(),
            ChannelOutput::Llr { llr, .. } => llr.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of erased positions (0 for LLR outputs).
    pub fn erasures(&self) -> usize {
        match self {
            ChannelOutput::Erasure { symbols, .. } => {
                symbols.iter().filter(|s| s.is_none()).count()
            }
            ChannelOutput::Llr { .. } => 0,
        }
    }

    /// LLR view of the output; a received erasure-channel symbol is `±∞`
    /// and an erasure is 0.
    pub fn to_llr(&self) -> Vec<f64> {
        match self {
            ChannelOutput::Erasure { symbols, .. } => symbols
                .iter()
                .map(|s| match s {
                    Some(0) => f64::INFINITY,
                    Some(_) => f64::NEG_INFINITY,
                    None => 0.0,
                })
                .collect(),
            ChannelOutput::Llr { llr, .. } => llr.clone(),
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::param(format!(
            "erasure probability {epsilon} not in [0, 1]"
        )))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "noise std-dev must be positive, got {sigma}"
        )))
    }
}

/// Erases each bit independently with probability `epsilon`.
pub fn bec_transmit_with<R: Rng + ?Sized>(
    x: &[u8],
    epsilon: f64,
    rng: &mut R,
) -> Result<ChannelOutput> {
    check_epsilon(epsilon)?;
    let symbols = x
        .iter()
        .map(|&b| {
            if rng.random_bool(epsilon) {
                None
            } else {
                Some(b & 1)
            }
        })
        .collect();
    Ok(ChannelOutput::Erasure { symbols, epsilon })
}

pub fn bec_transmit(x: &[u8], epsilon: f64, seed: u64) -> Result<ChannelOutput> {
    bec_transmit_with(x, epsilon, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// BPSK over additive white Gaussian noise of std-dev `sigma`.
pub fn awgn_transmit_with<R: Rng + ?Sized>(
    x: &[u8],
    sigma: f64,
    rng: &mut R,
) -> Result<ChannelOutput> {
    check_sigma(sigma)?;
    let scale = 2.0 / (sigma * sigma);
    let llr = x
        .iter()
        .map(|&b| {
            let s = if b & 1 == 0 { 1.0 } else { -1.0 };
            let noise: f64 = StandardNormal.sample(rng);
            scale * (s + sigma * noise)
        })
        .collect();
    Ok(ChannelOutput::Llr { llr, sigma })
}

pub fn awgn_transmit(x: &[u8], sigma: f64, seed: u64) -> Result<ChannelOutput> {
    awgn_transmit_with(x, sigma, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Noise std-dev for a given Eb/N0 (dB) at effective code rate `rate`:
/// `σ² = 1 / (2 R 10^(EbN0/10))`.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::param(format!("code rate {rate} not in (0, 1]")));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt())
}

pub fn sigma_to_ebn0(sigma: f64, rate: f64) -> f64 {
    10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10()
}

/// Bhattacharyya parameter of BI-AWGN(σ): `exp(−1/(2σ²))`.
pub fn awgn_bhattacharyya(sigma: f64) -> f64 {
    (-1.0 / (2.0 * sigma * sigma)).exp()
}

/// `log2(1 + e^{-l})` without overflow.
fn log2_one_plus_exp_neg(l: f64) -> f64 {
    let nat = if l > 0.0 {
        (-l).exp().ln_1p()
    } else {
        -l + l.exp().ln_1p()
    };
    nat / std::f64::consts::LN_2
}

/// Capacity (bits/use) of the binary-input AWGN channel with std-dev `sigma`.
///
/// `C = 1 − E[log2(1 + e^{−L})]` with `L ~ N(2/σ², 4/σ²)`, evaluated by
/// composite Simpson quadrature over ±12 standard deviations.
pub fn biawgn_capacity(sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let intervals = 4096;
    let (lo, hi) = (mean - 12.0 * sd, mean + 12.0 * sd);
    let h = (hi - lo) / intervals as f64;
    let density = |l: f64| {
        let z = (l - mean) / sd;
        (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
    };
    let mut acc = 0.0;
    for i in 0..=intervals {
        let l = lo + i as f64 * h;
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * density(l) * log2_one_plus_exp_neg(l);
    }
    Ok((1.0 - acc * h / 3.0).clamp(0.0, 1.0))
}

/// Noise std-dev at which the BI-AWGN capacity equals `capacity`.
pub fn sigma_for_capacity(capacity: f64) -> Result<f64> {
    if !(capacity > 0.0 && capacity < 1.0) {
        return Err(Error::param(format!("capacity {capacity} not in (0, 1)")));
    }
    // Capacity is decreasing in sigma.
    let (mut lo, mut hi) = (1e-3, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if biawgn_capacity(mid)? > capacity {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
