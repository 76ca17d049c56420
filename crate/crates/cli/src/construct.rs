use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use polarfec::channels::sigma_for_capacity;
use polarfec::concat::{build_concat, outer_spec_record, ConcatBuild, ConcatSpecFile};
use polarfec::ldpc::{construct_peg, DegreeDistribution};
use polarfec::polar::{
    awgn_reliability, bhattacharyya, bhattacharyya_bec, select_info_set, select_info_set_new_rule,
    CodeSpecFile, ConstructionRule, DEFAULT_AWGN_BUDGET,
};
use serde_json::json;

use crate::{print_json, CliError, CliResult};

#[derive(Subcommand, Debug)]
pub enum Construct {
    Polar(PolarArgs),
    Ldpc(LdpcArgs),
    Concat(ConcatArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignChannel {
    Bec,
    Awgn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AwgnMethod {
    /// Genie-aided SC Monte Carlo.
    MonteCarlo,
    /// Bhattacharyya recursion from `exp(-1/(2σ²))`.
    Bhattacharyya,
}

#[derive(Args, Debug)]
pub struct PolarArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rate: f64,
    #[arg(long, value_enum, default_value = "bec")]
    channel: DesignChannel,
    /// Erasure probability (bec) or noise std-dev (awgn).
    #[arg(long)]
    param: f64,
    #[arg(long, value_enum, default_value = "monte-carlo")]
    method: AwgnMethod,
    #[arg(long, default_value_t = DEFAULT_AWGN_BUDGET)]
    budget: usize,
    /// Use the leaf-set rule with this threshold (a power of two).
    #[arg(long)]
    leaf_threshold: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistChoice {
    /// Irregular pair used in the optical-transport setting.
    Optical,
    Regular,
}

#[derive(Args, Debug)]
pub struct LdpcArgs {
    #[arg(long)]
    length: usize,
    #[arg(long)]
    rate: f64,
    #[arg(long, value_enum, default_value = "optical")]
    dist: DistChoice,
    /// Variable degree for `--dist regular`.
    #[arg(long, default_value_t = 3)]
    dv: usize,
    /// Check degree for `--dist regular`.
    #[arg(long, default_value_t = 6)]
    dc: usize,
    /// Replace the check degrees by the two degrees that meet `--rate`.
    #[arg(long)]
    concentrate: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ConcatArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.979)]
    r_p: f64,
    #[arg(long, default_value_t = 0.95)]
    r_l: f64,
    #[arg(long, default_value_t = 0.93)]
    target: f64,
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    dir: PathBuf,
    #[arg(long, default_value = "concat")]
    stem: String,
}

pub fn run(c: Construct) -> CliResult<()> {
    match c {
        Construct::Polar(a) => polar(a),
        Construct::Ldpc(a) => ldpc(a),
        Construct::Concat(a) => concat(a),
    }
}

fn polar(a: PolarArgs) -> CliResult<()> {
    if !(0.0..=1.0).contains(&a.rate) {
        return Err(CliError::config(format!("rate {} not in [0, 1]", a.rate)));
    }
    let (profile, channel) = match (a.channel, a.method) {
        (DesignChannel::Bec, _) => (bhattacharyya_bec(a.param, a.n), "bec"),
        (DesignChannel::Awgn, AwgnMethod::MonteCarlo) => {
            (awgn_reliability(a.param, a.n, a.budget, a.seed), "awgn")
        }
        (DesignChannel::Awgn, AwgnMethod::Bhattacharyya) => (
            bhattacharyya((-1.0 / (2.0 * a.param * a.param)).exp(), a.n),
            "awgn",
        ),
    };
    let profile = profile.map_err(CliError::config)?;
    let k = (a.rate * profile.len() as f64).round() as usize;
    let (spec, rule, report) = match a.leaf_threshold {
        None => (
            select_info_set(&profile, k).map_err(CliError::config)?,
            ConstructionRule::Standard,
            None,
        ),
        Some(t) => {
            let (spec, report) =
                select_info_set_new_rule(&profile, k, t).map_err(CliError::config)?;
            (spec, ConstructionRule::New, Some(report))
        }
    };
    let mut file = CodeSpecFile::from_spec(&spec, rule, channel, a.param, a.seed);
    file.leaf_threshold = a.leaf_threshold;
    file.save(&a.out).map_err(CliError::runtime)?;
    print_json(&json!({
        "out": a.out,
        "n": spec.n(),
        "k": spec.k(),
        "rule": rule,
        "swaps": report.as_ref().map(|r| r.swaps.len()),
        "shortfall": report.map(|r| r.shortfall),
    }))
}

fn ldpc(a: LdpcArgs) -> CliResult<()> {
    let mut dist = match a.dist {
        DistChoice::Optical => DegreeDistribution::optical(),
        DistChoice::Regular => DegreeDistribution::regular(a.dv, a.dc).map_err(CliError::config)?,
    };
    if a.concentrate {
        dist = dist
            .with_concentrated_checks(a.rate)
            .map_err(CliError::config)?;
    }
    let h = construct_peg(&dist, a.length, a.rate, a.seed).map_err(CliError::config)?;
    h.write_alist(&a.out).map_err(CliError::runtime)?;
    print_json(&json!({
        "out": a.out,
        "n_l": h.n_l(),
        "m": h.m(),
        "k_l": h.k_l(),
        "rate": h.rate(),
        "edges": h.num_edges(),
    }))
}

fn concat(a: ConcatArgs) -> CliResult<()> {
    sigma_for_capacity(a.r_p).map_err(CliError::config)?;
    let cfg = ConcatBuild {
        reliability_budget: a.budget,
        target_r_eff: a.target,
        r_p: a.r_p,
        r_l: a.r_l,
        ..ConcatBuild::standard(a.n, a.seed)
    };
    let cs = build_concat(&cfg).map_err(CliError::config)?;
    let meta = outer_spec_record(&cs, &cfg).map_err(CliError::config)?;
    std::fs::create_dir_all(&a.dir).map_err(CliError::runtime)?;
    let path = ConcatSpecFile::save(&cs, &meta, &a.dir, &a.stem).map_err(CliError::runtime)?;
    print_json(&json!({
        "out": path,
        "k": cs.k(),
        "n": cs.polar().len(),
        "n_l": cs.n_l(),
        "r_p": cs.r_p(),
        "r_l": cs.r_l(),
        "r_eff": cs.r_eff(),
    }))
}
