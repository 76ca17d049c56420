//! Polar outer code, LDPC inner code.
//!
//! The polar codeword is the information word of a systematic LDPC code.
//! Decoding runs the LDPC decoder to completion, hands the posterior LLRs
//! of the systematic positions to polar BP as channel values, and decodes
//! the polar code once. There is no iteration between the stages.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::{sigma_for_capacity, ChannelOutput};
use crate::decoders::{BpDecoder, BpOptions, DecodeResult};
use crate::error::{Error, Result};
use crate::ldpc::{construct_peg, DegreeDistribution, LdpcDecoder, LdpcEncoder, ParityCheckMatrix};
use crate::polar::{
    awgn_reliability, encode, polar_transform_in_place, select_info_set, CodeSpec, CodeSpecFile,
    ConstructionRule,
};

/// Overall rate of the optical-transport setting.
pub const DEFAULT_TARGET_R_EFF: f64 = 0.93;

/// Tolerance on `R_eff` against its target.
pub const R_EFF_TOLERANCE: f64 = 1e-3;

/// Seeds tried after the requested one when PEG yields a rank-deficient
/// matrix.
const RESEED_ATTEMPTS: u64 = 16;

/// A polar code whose codeword fills the information positions of an LDPC
/// code.
#[derive(Debug, Clone)]
pub struct ConcatSpec {
    polar: CodeSpec,
    ldpc: ParityCheckMatrix,
    encoder: LdpcEncoder,
}

impl ConcatSpec {
    pub fn new(polar: CodeSpec, ldpc: ParityCheckMatrix) -> Result<Self> {
        let encoder = LdpcEncoder::new(&ldpc)?;
        if encoder.k_l() != polar.len() {
            return Err(Error::LengthMismatch {
                expected: polar.len(),
                actual: encoder.k_l(),
            });
        }
        Ok(ConcatSpec {
            polar,
            ldpc,
            encoder,
        })
    }

    pub fn polar(&self) -> &CodeSpec {
        &self.polar
    }

    pub fn ldpc(&self) -> &ParityCheckMatrix {
        &self.ldpc
    }

    pub fn ldpc_encoder(&self) -> &LdpcEncoder {
        &self.encoder
    }

    /// LDPC codeword positions that carry the polar codeword, in order.
    pub fn systematic_positions(&self) -> &[usize] {
        self.encoder.info_positions()
    }

    pub fn r_p(&self) -> f64 {
        self.polar.rate()
    }

    pub fn r_l(&self) -> f64 {
        self.ldpc.rate()
    }

    /// `R_p·R_l`, which equals `K_p / N_l`.
    pub fn r_eff(&self) -> f64 {
        self.r_p() * self.r_l()
    }

    /// Number of information bits per block.
    pub fn k(&self) -> usize {
        self.polar.k()
    }

    /// Channel block length.
    pub fn n_l(&self) -> usize {
        self.ldpc.n_l()
    }

    pub fn check_r_eff(&self, target: f64) -> Result<()> {
        if (self.r_eff() - target).abs() > R_EFF_TOLERANCE {
            return Err(Error::param(format!(
                "R_eff = {:.5} is not within {R_EFF_TOLERANCE} of {target}",
                self.r_eff()
            )));
        }
        Ok(())
    }
}

/// Parameters of [`build_concat`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcatBuild {
    /// Polar depth; the polar length `N = 2^n` is also `K_l`.
    pub n: usize,
    pub r_p: f64,
    pub r_l: f64,
    /// LDPC variable degrees; the check side is concentrated to meet `r_l`.
    pub dist: DegreeDistribution,
    pub seed: u64,
    /// Monte Carlo frames for the polar design.
    pub reliability_budget: usize,
    pub target_r_eff: f64,
}

impl ConcatBuild {
    /// `(R_p, R_l) = (0.979, 0.95)` with the optical-transport variable degrees.
    pub fn standard(n: usize, seed: u64) -> Self {
        ConcatBuild {
            n,
            r_p: 0.979,
            r_l: 0.95,
            dist: DegreeDistribution::optical(),
            seed,
            reliability_budget: 20_000,
            target_r_eff: DEFAULT_TARGET_R_EFF,
        }
    }
}

/// Polar design for a BI-AWGN channel whose capacity equals `r_p`.
pub fn design_outer_polar(n: usize, r_p: f64, budget: usize, seed: u64) -> Result<(CodeSpec, f64)> {
    let len = 1usize << n;
    let k = (r_p * len as f64).round() as usize;
    let sigma = sigma_for_capacity(r_p)?;
    let profile = awgn_reliability(sigma, n, budget, seed)?;
    Ok((select_info_set(&profile, k)?, sigma))
}

/// PEG matrix with `n_l` code bits and exactly `n_l − k_l` checks,
/// re-seeding while the result is rank deficient.
pub fn build_inner_ldpc(
    dist: &DegreeDistribution,
    n_l: usize,
    k_l: usize,
    seed: u64,
) -> Result<ParityCheckMatrix> {
    if k_l >= n_l {
        return Err(Error::param(format!(
            "K_l = {k_l} must be below N_l = {n_l}"
        )));
    }
    let m = n_l - k_l;
    // A rate that rounds to exactly m checks.
    let rate = 1.0 - m as f64 / n_l as f64;
    let mut last = None;
    for s in seed..seed + RESEED_ATTEMPTS {
        let h = construct_peg(dist, n_l, rate, s)?;
        if h.k_l() == k_l {
            return Ok(h);
        }
        last = Some(h.rank());
    }
    Err(Error::RankDeficient {
        rank: last.unwrap_or(0),
        rows: m,
    })
}

/// Builds the concatenated code: `K_p = round(R_p·N)`, `N_l = round(N/R_l)`.
pub fn build_concat(cfg: &ConcatBuild) -> Result<ConcatSpec> {
    if !(cfg.r_p > 0.0 && cfg.r_p <= 1.0 && cfg.r_l > 0.0 && cfg.r_l < 1.0) {
        return Err(Error::param(format!(
            "rates ({}, {}) out of range",
            cfg.r_p, cfg.r_l
        )));
    }
    let (polar, _) = design_outer_polar(cfg.n, cfg.r_p, cfg.reliability_budget, cfg.seed)?;
    let n = polar.len();
    let n_l = (n as f64 / cfg.r_l).round() as usize;
    let dist = cfg
        .dist
        .with_concentrated_checks(1.0 - (n_l - n) as f64 / n_l as f64)?;
    let ldpc = build_inner_ldpc(&dist, n_l, n, cfg.seed)?;
    let cs = ConcatSpec::new(polar, ldpc)?;
    cs.check_r_eff(cfg.target_r_eff)?;
    Ok(cs)
}

/// Polar encoding followed by systematic LDPC encoding.
pub fn concat_encode(cs: &ConcatSpec, info: &[u8]) -> Result<Vec<u8>> {
    let polar_word = encode(&cs.polar, info)?;
    cs.encoder.encode(&polar_word.0)
}

/// Options of [`concat_decode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcatDecodeOptions {
    pub ldpc_max_iter: usize,
    /// BP options of the polar stage; `None` skips the stage and inverts the
    /// LDPC decisions on the systematic positions directly.
    pub polar: Option<BpOptions>,
}

impl Default for ConcatDecodeOptions {
    fn default() -> Self {
        ConcatDecodeOptions {
            ldpc_max_iter: 60,
            polar: Some(BpOptions::default()),
        }
    }
}

/// Outcome of decoding one concatenated block.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcatOutput {
    /// Information-bit estimates with the iterations of the polar stage
    /// (0 when the stage is skipped).
    pub result: DecodeResult,
    pub ldpc_iterations: usize,
    pub ldpc_converged: bool,
    /// LLRs handed to the polar stage, one per polar code bit.
    pub handoff_llr: Vec<f64>,
    /// LDPC hard decisions on the systematic positions.
    pub handoff_hard: Vec<u8>,
}

/// Reusable decoder state for one [`ConcatSpec`].
#[derive(Debug, Clone)]
pub struct ConcatDecoder {
    positions: Vec<usize>,
    ldpc: LdpcDecoder,
    polar: BpDecoder,
}

impl ConcatDecoder {
    pub fn new(cs: &ConcatSpec) -> Self {
        ConcatDecoder {
            positions: cs.systematic_positions().to_vec(),
            ldpc: LdpcDecoder::new(&cs.ldpc),
            polar: BpDecoder::new(&cs.polar),
        }
    }

    pub fn decode(
        &mut self,
        y: &ChannelOutput,
        opts: &ConcatDecodeOptions,
    ) -> Result<ConcatOutput> {
        let ldpc_out = self.ldpc.decode(&y.to_llr(), opts.ldpc_max_iter)?;
        let handoff_llr: Vec<f64> = self.positions.iter().map(|&p| ldpc_out.llr[p]).collect();
        let handoff_hard: Vec<u8> = self.positions.iter().map(|&p| ldpc_out.hard[p]).collect();
        let result = match &opts.polar {
            Some(bp) => self.polar.decode_llr(&handoff_llr, bp)?,
            None => {
                let mut u = handoff_hard.clone();
                polar_transform_in_place(&mut u);
                DecodeResult {
                    info_estimate: self.polar.spec().gather(&u).into_iter().map(Some).collect(),
                    iterations_used: 0,
                    converged: ldpc_out.converged,
                    unresolved: Vec::new(),
                }
            }
        };
        Ok(ConcatOutput {
            result,
            ldpc_iterations: ldpc_out.iterations_used,
            ldpc_converged: ldpc_out.converged,
            handoff_llr,
            handoff_hard,
        })
    }
}

/// Decodes one block with a fresh [`ConcatDecoder`].
pub fn concat_decode(
    cs: &ConcatSpec,
    y: &ChannelOutput,
    opts: &ConcatDecodeOptions,
) -> Result<ConcatOutput> {
    ConcatDecoder::new(cs).decode(y, opts)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// On-disk description of a [`ConcatSpec`]: the polar spec file and the
/// alist file by path (relative to this file) and SHA-256.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcatSpecFile {
    pub polar_spec: PathBuf,
    pub polar_sha256: String,
    pub ldpc_alist: PathBuf,
    pub ldpc_sha256: String,
    pub r_p: f64,
    pub r_l: f64,
    pub r_eff: f64,
}

impl ConcatSpecFile {
    /// Writes `<stem>.polar.toml`, `<stem>.alist` and `<stem>.concat.toml`
    /// into `dir`; returns the path of the last.
    pub fn save(
        cs: &ConcatSpec,
        polar_meta: &CodeSpecFile,
        dir: &Path,
        stem: &str,
    ) -> Result<PathBuf> {
        let polar_name = PathBuf::from(format!("{stem}.polar.toml"));
        let alist_name = PathBuf::from(format!("{stem}.alist"));
        let polar_text = polar_meta.to_toml();
        let alist_text = cs.ldpc.to_alist();
        let write = |name: &Path, text: &str| {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(path, e))
        };
        write(&polar_name, &polar_text)?;
        write(&alist_name, &alist_text)?;
        let file = ConcatSpecFile {
            polar_sha256: sha256_hex(polar_text.as_bytes()),
            polar_spec: polar_name,
            ldpc_sha256: sha256_hex(alist_text.as_bytes()),
            ldpc_alist: alist_name,
            r_p: cs.r_p(),
            r_l: cs.r_l(),
            r_eff: cs.r_eff(),
        };
        let own = PathBuf::from(format!("{stem}.concat.toml"));
        write(
            &own,
            &toml::to_string(&file).expect("concat spec serializes"),
        )?;
        Ok(dir.join(own))
    }

    /// Loads and verifies both referenced files.
    pub fn load(path: &Path) -> Result<ConcatSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ConcatSpecFile = toml::from_str(&text).map_err(|e| Error::Parse {
            what: "concat spec",
            detail: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let read_checked = |name: &Path, sha: &str| -> Result<String> {
            let p = base.join(name);
            let body = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            if sha256_hex(body.as_bytes()) != sha {
                return Err(Error::Checksum(p));
            }
            Ok(body)
        };
        let polar = CodeSpecFile::from_toml(&read_checked(&file.polar_spec, &file.polar_sha256)?)?
            .to_spec()?;
        let ldpc =
            ParityCheckMatrix::from_alist(&read_checked(&file.ldpc_alist, &file.ldpc_sha256)?)?;
        ConcatSpec::new(polar, ldpc)
    }
}

/// Polar spec record for the outer code of a concatenated build.
pub fn outer_spec_record(cs: &ConcatSpec, cfg: &ConcatBuild) -> Result<CodeSpecFile> {
    let sigma = sigma_for_capacity(cfg.r_p)?;
    Ok(CodeSpecFile::from_spec(
        cs.polar(),
        ConstructionRule::Standard,
        "awgn",
        sigma,
        cfg.seed,
    ))
}
