use std::path::PathBuf;

use clap::Args;
use polarfec::decoders::StageOrder;
use polarfec::sim::{run_sweep, ChannelKind, OutputPaths, Scheme, SimCode, SweepConfig};

use crate::{print_line, CliError, CliResult};

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

pub fn parse_scheme(s: &str) -> Result<Scheme, String> {
    parse_kebab(s)
        .map_err(|_| format!("unknown scheme {s:?}; expected polar-sc, polar-bp, ldpc or concat"))
}

pub fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    parse_kebab(s).map_err(|_| format!("unknown channel {s:?}; expected bec or awgn"))
}

pub fn parse_stage_order(s: &str) -> Result<StageOrder, String> {
    parse_kebab(s).map_err(|_| format!("unknown stage order {s:?}; expected natural or mirrored"))
}

/// Flags override the fields of `--config`.
#[derive(Args, Debug)]
pub struct Sweep {
    /// TOML file with `SweepConfig` fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_parser = parse_channel)]
    channel: Option<ChannelKind>,
    /// Erasure probabilities (bec) or Eb/N0 values in dB (awgn).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    grid: Option<Vec<f64>>,
    #[arg(long)]
    min_error_blocks: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    polar_max_iter: Option<usize>,
    #[arg(long)]
    quantize: bool,
    #[arg(long, value_parser = parse_stage_order)]
    stage_order: Option<StageOrder>,
    #[arg(long)]
    batch: Option<u64>,
    /// Overrides `POLARFEC_WORKERS`.
    #[arg(long)]
    workers: Option<usize>,
    /// Output stem for `.csv`, `.jsonl` and `.meta.json`.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn build_config(a: Sweep) -> CliResult<SweepConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            toml::from_str::<SweepConfig>(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        }
        None => {
            let missing =
                |what: &str| CliError::config(format!("--{what} is required without --config"));
            SweepConfig::new(
                a.scheme.ok_or_else(|| missing("scheme"))?,
                a.channel.ok_or_else(|| missing("channel"))?,
                a.grid.clone().ok_or_else(|| missing("grid"))?,
                a.max_frames.ok_or_else(|| missing("max-frames"))?,
            )
        }
    };
    if let Some(v) = a.scheme {
        cfg.scheme = v;
    }
    if let Some(v) = a.spec {
        cfg.spec = v;
    }
    if let Some(v) = a.channel {
        cfg.channel = v;
    }
    if let Some(v) = a.grid {
        cfg.grid = v;
    }
    if let Some(v) = a.min_error_blocks {
        cfg.min_error_blocks = v;
    }
    if let Some(v) = a.max_frames {
        cfg.max_frames = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.max_iter {
        cfg.max_iter = v;
    }
    if a.polar_max_iter.is_some() {
        cfg.polar_max_iter = a.polar_max_iter;
    }
    cfg.quantize |= a.quantize;
    if let Some(v) = a.stage_order {
        cfg.stage_order = v;
    }
    if let Some(v) = a.batch {
        cfg.batch = v;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    if a.output.is_some() {
        cfg.output = a.output;
    }
    if cfg.spec.as_os_str().is_empty() {
        return Err(CliError::config("no code spec given (--spec)"));
    }
    Ok(cfg)
}

pub fn run(a: Sweep) -> CliResult<()> {
    let cfg = build_config(a)?;
    cfg.validate().map_err(CliError::config)?;
    SimCode::load(&cfg).map_err(CliError::config)?;
    let records = run_sweep(&cfg).map_err(CliError::runtime)?;
    for r in &records {
        let line = serde_json::to_string(r).map_err(CliError::runtime)?;
        print_line(&line)?;
    }
    if let Some(stem) = &cfg.output {
        let p = OutputPaths::from_stem(stem);
        eprintln!("records in {} and {}", p.csv.display(), p.jsonl.display());
    }
    Ok(())
}
