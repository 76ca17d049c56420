use std::path::PathBuf;

use clap::Args;
use polarfec::channels::{awgn_transmit_with, bec_transmit_with, ebn0_to_sigma, ChannelOutput};
use polarfec::concat::{concat_encode, ConcatDecodeOptions, ConcatDecoder};
use polarfec::decoders::{sc_decode, BpDecoder, BpOptions, Quantizer, StageOrder};
use polarfec::ldpc::{LdpcDecoder, LdpcEncoder};
use polarfec::polar::encode;
use polarfec::seeding::{frame_rng, Stream};
use polarfec::sim::{ChannelKind, Scheme, SimCode, SweepConfig};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::sweep::{parse_channel, parse_scheme, parse_stage_order};
use crate::{print_json, CliError, CliResult};

#[derive(Args, Debug)]
pub struct Decode {
    #[arg(long, value_parser = parse_scheme)]
    scheme: Scheme,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelKind,
    /// Erasure probability (bec) or Eb/N0 in dB (awgn).
    #[arg(long)]
    param: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frame index within the seed's schedule.
    #[arg(long, default_value_t = 0)]
    frame: u64,
    #[arg(long, default_value_t = 60)]
    max_iter: usize,
    #[arg(long)]
    polar_max_iter: Option<usize>,
    #[arg(long)]
    quantize: bool,
    #[arg(long, value_parser = parse_stage_order, default_value = "mirrored")]
    stage_order: StageOrder,
    /// Include the channel output and decoder hand-off in the report.
    #[arg(long)]
    dump: bool,
}

fn channel_json(y: &ChannelOutput) -> Value {
    match y {
        ChannelOutput::Erasure { symbols, .. } => json!(symbols),
        ChannelOutput::Llr { llr, .. } => json!(llr),
    }
}

pub fn run(a: Decode) -> CliResult<()> {
    let mut cfg = SweepConfig::new(a.scheme, a.channel, vec![a.param], 1);
    cfg.spec = a.spec.clone();
    cfg.seed = a.seed;
    cfg.max_iter = a.max_iter;
    cfg.polar_max_iter = a.polar_max_iter;
    cfg.quantize = a.quantize;
    cfg.stage_order = a.stage_order;
    cfg.validate().map_err(CliError::config)?;
    let (code, _) = SimCode::load(&cfg).map_err(CliError::config)?;
    let bp = |max_iter: usize| BpOptions {
        max_iter,
        quantizer: a.quantize.then(Quantizer::default),
        stage_order: a.stage_order,
    };

    let mut info_rng = frame_rng(a.seed, Stream::Info, 0, a.frame);
    let info: Vec<u8> = (0..code.k()).map(|_| info_rng.random_range(0..2)).collect();
    let ldpc_encoder = match &code {
        SimCode::Ldpc(h) => Some(LdpcEncoder::new(h).map_err(CliError::config)?),
        _ => None,
    };
    let x = match (&code, &ldpc_encoder) {
        (SimCode::Polar(s), _) => encode(s, &info).map(|b| b.0),
        (SimCode::Ldpc(_), Some(enc)) => enc.encode(&info),
        (SimCode::Concat(c), _) => concat_encode(c, &info),
        (SimCode::Ldpc(_), None) => unreachable!(),
    }
    .map_err(CliError::runtime)?;
    let mut ch_rng = frame_rng(a.seed, Stream::Channel, 0, a.frame);
    let y = match a.channel {
        ChannelKind::Bec => bec_transmit_with(&x, a.param, &mut ch_rng),
        ChannelKind::Awgn => {
            let sigma = ebn0_to_sigma(a.param, code.rate()).map_err(CliError::config)?;
            awgn_transmit_with(&x, sigma, &mut ch_rng)
        }
    }
    .map_err(CliError::config)?;

    let mut out = Map::new();
    out.insert("scheme".into(), json!(a.scheme));
    out.insert("k".into(), json!(code.k()));
    out.insert("length".into(), json!(code.len()));
    let estimate: Vec<Option<u8>> = match (&code, a.scheme) {
        (SimCode::Polar(s), Scheme::PolarSc) => {
            let r = sc_decode(s, &y).map_err(CliError::runtime)?;
            out.insert("iterations".into(), json!(r.iterations_used));
            r.info_estimate
        }
        (SimCode::Polar(s), _) => {
            let r = BpDecoder::new(s)
                .decode(&y, &bp(a.max_iter))
                .map_err(CliError::runtime)?;
            out.insert("iterations".into(), json!(r.iterations_used));
            out.insert("converged".into(), json!(r.converged));
            out.insert("unresolved".into(), json!(r.unresolved));
            r.info_estimate
        }
        (SimCode::Ldpc(h), _) => {
            let r = LdpcDecoder::new(h)
                .decode(&y.to_llr(), a.max_iter)
                .map_err(CliError::runtime)?;
            out.insert("iterations".into(), json!(r.iterations_used));
            out.insert("converged".into(), json!(r.converged));
            if a.dump {
                out.insert("posterior_llr".into(), json!(r.llr));
            }
            let enc = ldpc_encoder.as_ref().expect("ldpc encoder");
            enc.extract(&r.hard).into_iter().map(Some).collect()
        }
        (SimCode::Concat(c), _) => {
            let opts = ConcatDecodeOptions {
                ldpc_max_iter: a.max_iter,
                polar: Some(bp(a.polar_max_iter.unwrap_or(a.max_iter))),
            };
            let r = ConcatDecoder::new(c)
                .decode(&y, &opts)
                .map_err(CliError::runtime)?;
            out.insert("ldpc_iterations".into(), json!(r.ldpc_iterations));
            out.insert("ldpc_converged".into(), json!(r.ldpc_converged));
            out.insert("polar_iterations".into(), json!(r.result.iterations_used));
            out.insert("polar_converged".into(), json!(r.result.converged));
            if a.dump {
                out.insert("handoff_llr".into(), json!(r.handoff_llr));
            }
            r.result.info_estimate
        }
    };
    let errors = estimate
        .iter()
        .zip(&info)
        .filter(|(e, &b)| **e != Some(b))
        .count();
    out.insert("bit_errors".into(), json!(errors));
    out.insert(
        "erasures".into(),
        json!(estimate.iter().filter(|e| e.is_none()).count()),
    );
    if a.dump {
        out.insert("info".into(), json!(info));
        out.insert("estimate".into(), json!(estimate));
        out.insert("codeword".into(), json!(x));
        out.insert("channel_output".into(), channel_json(&y));
    }
    print_json(&Value::Object(out))
}
