//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! `ACCEPTANCE_ONLY=3,7` restricts the run to the listed criteria.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use polarfec::channels::{awgn_transmit, bec_transmit, ebn0_to_sigma, ChannelOutput};
use polarfec::concat::{
    build_concat, build_inner_ldpc, concat_encode, outer_spec_record, ConcatBuild,
    ConcatDecodeOptions, ConcatDecoder, ConcatSpec, ConcatSpecFile,
};
use polarfec::decoders::{bp_decode, peel_fixpoint, BpOptions, StageOrder};
use polarfec::factor_graph::{
    enumerated_stopping_distance, girth, leaf_size, low_weight_count, low_weight_table,
    mvss_lower_bound, mvss_size, size_distributions, stopping_distance, FactorGraph,
};
use polarfec::ldpc::{ldpc_bp_decode, DegreeDistribution};
use polarfec::polar::{
    bhattacharyya, bhattacharyya_bec, encode, polar_transform_in_place, row_weight,
    select_info_set, select_info_set_new_rule, CodeSpec,
};
use polarfec::sim::{
    run_sweep, run_sweep_code, ChannelKind, OutputPaths, Scheme, SimCode, SweepConfig,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn random_bits(len: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..len).map(|_| rng.random_range(0..2)).collect()
}

fn all_frames(scheme: Scheme, channel: ChannelKind, grid: Vec<f64>, frames: u64) -> SweepConfig {
    let mut cfg = SweepConfig::new(scheme, channel, grid, frames);
    cfg.min_error_blocks = u64::MAX;
    cfg
}

fn c1_leaf_sets() -> Outcome {
    for n in 0..=16 {
        let (_, b) = size_distributions(n);
        for (i, &bi) in b.iter().enumerate() {
            let f = leaf_size(i, n).map_err(|e| e.to_string())?;
            let w = row_weight(i, n).map_err(|e| e.to_string())?;
            let direct = 1usize << i.count_ones();
            ensure(f == bi && bi == w && w == direct, || {
                format!("n={n} i={i}: recursion {f}, B_n {bi}, row weight {w}, 2^popcount {direct}")
            })?;
        }
    }
    Ok("f(i) = B_n(i) = row weight = 2^popcount(i) for every i, n <= 16".into())
}

fn c2_weight_spectrum() -> Outcome {
    for n in 0..=16usize {
        let mut counts = vec![0u64; n + 1];
        for i in 0..1usize << n {
            let f = leaf_size(i, n).map_err(|e| e.to_string())?;
            counts[f.trailing_zeros() as usize] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            ensure(c == binom(n as u64, k as u64), || {
                format!("n={n}: {c} inputs with f = 2^{k}")
            })?;
        }
    }
    Ok("#{i : f(i) = 2^k} = C(n, k) for n <= 16".into())
}

fn c3_girth() -> Outcome {
    let g1 = girth(&FactorGraph::build(1).map_err(|e| e.to_string())?);
    ensure(g1.is_none(), || format!("n=1: girth {g1:?}, expected none"))?;
    let mut times = Vec::new();
    for n in 2..=8 {
        let t = Instant::now();
        let g = girth(&FactorGraph::build(n).map_err(|e| e.to_string())?);
        ensure(g == Some(12), || format!("n={n}: girth {g:?}"))?;
        times.push(t.elapsed());
    }
    Ok(format!(
        "girth 12 for n = 2..8, acyclic for n = 1 (n=8 took {:.2?})",
        times[6]
    ))
}

fn c4_stopping_distance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for n in [2usize, 3, 4] {
        let len = 1usize << n;
        let g = FactorGraph::build(n).map_err(|e| e.to_string())?;
        let sets: Vec<Vec<usize>> = if n < 4 {
            (1u32..1 << len)
                .map(|m| (0..len).filter(|&i| m >> i & 1 == 1).collect())
                .collect()
        } else {
            (0..200)
                .map(|_| {
                    let mut rows: Vec<usize> = (0..len).collect();
                    rows.shuffle(&mut rng);
                    rows.truncate(rng.random_range(1..=len));
                    rows
                })
                .collect()
        };
        for info in sets {
            let spec = CodeSpec::new(n, info.iter().copied()).map_err(|e| e.to_string())?;
            let enumerated = enumerated_stopping_distance(&g, &spec).map_err(|e| e.to_string())?;
            let by_leaf_sets = stopping_distance(&spec).map_err(|e| e.to_string())?;
            let min_weight = info
                .iter()
                .map(|&i| row_weight(i, n).unwrap())
                .min()
                .unwrap();
            ensure(
                enumerated == by_leaf_sets && by_leaf_sets == min_weight,
                || {
                    format!("N={len} A={info:?}: enumerated {enumerated}, min f {by_leaf_sets}, min row weight {min_weight}")
                },
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} information sets over N = 4, 8, 16"))
}

fn c5_mvss_bound() -> Outcome {
    let n = 3;
    let g = FactorGraph::build(n).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut subsets, mut tight) = (0, 0);
    for _ in 0..20 {
        let mask: u32 = rng.random_range(1..256);
        let info: Vec<usize> = (0..8).filter(|&i| mask >> i & 1 == 1).collect();
        let spec = CodeSpec::new(n, info.iter().copied()).map_err(|e| e.to_string())?;
        for sub in 1u32..1 << info.len() {
            let j: Vec<usize> = (0..info.len())
                .filter(|&b| sub >> b & 1 == 1)
                .map(|b| info[b])
                .collect();
            let size = mvss_size(&g, &j).map_err(|e| e.to_string())?;
            let bound = mvss_lower_bound(&spec, &j).map_err(|e| e.to_string())?;
            ensure(size >= bound, || {
                format!("A={info:?} J={j:?}: |MVSS| {size} < bound {bound}")
            })?;
            if j.len() == 1 {
                ensure(size == bound, || {
                    format!("J={j:?}: |MVSS| {size} != f = {bound}")
                })?;
                tight += 1;
            }
            subsets += 1;
        }
    }
    Ok(format!(
        "{subsets} subsets J over 20 random A; equality on all {tight} singletons"
    ))
}

fn c6_low_weight() -> Outcome {
    // (numerator, denominator) of each exponent, so the oracle is exact.
    let eps = [(1u64, 10u64), (2, 10), (3, 10), (4, 10), (45, 100)];
    let eps_f: Vec<f64> = eps.iter().map(|&(a, b)| a as f64 / b as f64).collect();
    let ns: Vec<usize> = (8..=16).collect();
    let table = low_weight_table(&ns, &eps_f).map_err(|e| e.to_string())?;
    for row in &table {
        ensure(row.holds(), || {
            format!(
                "n={} eps={}: {} >= {}",
                row.n, row.eps, row.count, row.bound
            )
        })?;
        let (a, b) = eps[eps_f.iter().position(|&e| e == row.eps).unwrap()];
        let n = row.n as u64;
        let oracle: u64 = (0..=n)
            .filter(|&k| k * b < n * a)
            .map(|k| binom(n, k))
            .sum();
        ensure(row.count == oracle, || {
            format!("n={n} eps={}: count {} != {oracle}", row.eps, row.count)
        })?;
    }
    let c = low_weight_count(10, 0.3).map_err(|e| e.to_string())?;
    ensure(c == 56, || format!("n=10, eps=0.3: {c}"))?;
    Ok(format!(
        "{} (n, eps) pairs below N^H(eps); n=10, eps=0.3 gives 56",
        table.len()
    ))
}

fn c7_bp_equals_peeling() -> Outcome {
    let n = 7;
    let g = FactorGraph::build(n).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nonempty = 0;
    for eps in [0.3, 0.5] {
        let spec = select_info_set(&bhattacharyya_bec(eps, n).unwrap(), 64).unwrap();
        for (t, order) in (0..5000).zip(
            [StageOrder::Mirrored, StageOrder::Natural]
                .into_iter()
                .cycle(),
        ) {
            let opts = BpOptions {
                max_iter: 10_000,
                stage_order: order,
                ..BpOptions::default()
            };
            let x = encode(&spec, &random_bits(spec.k(), &mut rng)).unwrap();
            let y = bec_transmit(&x.0, eps, rng.random()).unwrap();
            let ChannelOutput::Erasure { symbols, .. } = &y else {
                unreachable!()
            };
            let r = bp_decode(&spec, &g, &y, &opts).map_err(|e| e.to_string())?;
            let mut known = vec![false; spec.len()];
            let mut erased = vec![false; spec.len()];
            for i in 0..spec.len() {
                known[order.graph_row(n, i)] = spec.is_frozen(i);
                erased[order.graph_row(n, i)] = symbols[i].is_none();
            }
            let residual = peel_fixpoint(&g, &known, &erased).map_err(|e| e.to_string())?;
            ensure(r.unresolved == residual, || {
                format!(
                    "eps={eps} frame {t}: BP left {} variables, peeling {}",
                    r.unresolved.len(),
                    residual.len()
                )
            })?;
            nonempty += usize::from(!residual.is_empty());
        }
    }
    Ok(format!(
        "10^4 frames identical, {nonempty} with a non-empty residual"
    ))
}

fn c8_bp_vs_sc() -> Outcome {
    let (n, frames) = (10, 10_000u64);
    let mut lines = Vec::new();
    for eps in [0.35, 0.40, 0.45] {
        let spec = select_info_set(&bhattacharyya_bec(eps, n).unwrap(), 512).unwrap();
        let code = SimCode::Polar(spec);
        let sc = run_sweep_code(
            &all_frames(Scheme::PolarSc, ChannelKind::Bec, vec![eps], frames),
            &code,
        )
        .map_err(|e| e.to_string())?;
        let bp = run_sweep_code(
            &all_frames(Scheme::PolarBp, ChannelKind::Bec, vec![eps], frames),
            &code,
        )
        .map_err(|e| e.to_string())?;
        let (s, b) = (&sc[0], &bp[0]);
        let bits = (s.frames * s.k as u64) as f64;
        let se = (s.ber * (1.0 - s.ber) / bits).sqrt();
        ensure(b.ber <= s.ber + 2.0 * se, || {
            format!(
                "eps={eps}: BP {:.3e} > SC {:.3e} + 2 x {se:.1e}",
                b.ber, s.ber
            )
        })?;
        lines.push(format!("eps={eps}: BP {:.3e} vs SC {:.3e}", b.ber, s.ber));
    }
    Ok(lines.join("; "))
}

/// Leaf-set threshold of the new rule at N = 2^13, K = 4096.
const NEW_RULE_THRESHOLD: usize = 32;

fn c9_new_rule() -> Outcome {
    let (n, k) = (13, 4096);
    let sigma = ebn0_to_sigma(2.0, 0.5).unwrap();
    let profile = bhattacharyya((-1.0 / (2.0 * sigma * sigma)).exp(), n).unwrap();
    let standard = select_info_set(&profile, k).unwrap();
    let (new, report) =
        select_info_set_new_rule(&profile, k, NEW_RULE_THRESHOLD).map_err(|e| e.to_string())?;
    ensure(report.shortfall.is_empty(), || {
        format!("{} deficient bits left", report.shortfall.len())
    })?;
    let (d_std, d_new) = (
        stopping_distance(&standard).unwrap(),
        stopping_distance(&new).unwrap(),
    );
    ensure(d_new > d_std, || {
        format!("stopping distance {d_new} not above {d_std}")
    })?;

    // New rule at s and s + 0.4 dB, standard rule 0.2 dB either side.
    let points = [1.7, 2.1];
    let frames = 10_000;
    let std_grid = vec![1.5, 1.9, 2.3];
    let std_recs = run_sweep_code(
        &all_frames(Scheme::PolarBp, ChannelKind::Awgn, std_grid.clone(), frames),
        &SimCode::Polar(standard),
    )
    .map_err(|e| e.to_string())?;
    let new_recs = run_sweep_code(
        &all_frames(Scheme::PolarBp, ChannelKind::Awgn, points.to_vec(), frames),
        &SimCode::Polar(new),
    )
    .map_err(|e| e.to_string())?;
    let mut lines = vec![format!(
        "d {d_std} -> {d_new} with {} swaps",
        report.swaps.len()
    )];
    for (i, r) in new_recs.iter().enumerate() {
        let worse = &std_recs[i];
        let better = &std_recs[i + 1];
        ensure(better.ber <= r.ber && r.ber <= worse.ber, || {
            format!(
                "{:.1} dB: new {:.3e} outside standard [{:.3e} @ {:.1}, {:.3e} @ {:.1}]",
                r.param, r.ber, better.ber, better.param, worse.ber, worse.param
            )
        })?;
        lines.push(format!(
            "{:.1} dB: new {:.3e} in [{:.3e}, {:.3e}]",
            r.param, r.ber, better.ber, worse.ber
        ));
    }
    Ok(lines.join("; "))
}

/// Scaled concatenated code and its equal-rate LDPC-only baseline.
fn scaled_codes() -> Result<(ConcatSpec, SimCode), String> {
    let cs = build_concat(&ConcatBuild::standard(10, 1)).map_err(|e| e.to_string())?;
    let base = build_inner_ldpc(&DegreeDistribution::optical(), cs.n_l(), cs.k(), 1)
        .map_err(|e| e.to_string())?;
    Ok((cs, SimCode::Ldpc(base)))
}

fn c10_concatenation() -> Outcome {
    let (cs, base) = scaled_codes()?;
    ensure(cs.polar().len() == cs.ldpc().k_l(), || {
        "interface width mismatch".into()
    })?;
    ensure((cs.r_eff() - 0.93).abs() <= 1e-3, || {
        format!("R_eff = {}", cs.r_eff())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut dec = ConcatDecoder::new(&cs);

    let high = ebn0_to_sigma(9.0, cs.r_eff()).unwrap();
    for t in 0..200 {
        let info = random_bits(cs.k(), &mut rng);
        let word = concat_encode(&cs, &info).map_err(|e| e.to_string())?;
        let y = awgn_transmit(&word, high, t).unwrap();
        let out = dec
            .decode(&y, &ConcatDecodeOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(
            out.result.hard_bits() == info && out.result.erasures() == 0,
            || format!("frame {t} not recovered"),
        )?;
    }

    let mid = ebn0_to_sigma(5.0, cs.r_eff()).unwrap();
    let isolated = ConcatDecodeOptions {
        ldpc_max_iter: 60,
        polar: None,
    };
    for t in 0..200 {
        let word = concat_encode(&cs, &random_bits(cs.k(), &mut rng)).unwrap();
        let y = awgn_transmit(&word, mid, 1000 + t).unwrap();
        let out = dec.decode(&y, &isolated).map_err(|e| e.to_string())?;
        let plain = ldpc_bp_decode(cs.ldpc(), &y.to_llr(), 60).unwrap();
        let pos = cs.systematic_positions();
        let hard: Vec<u8> = pos.iter().map(|&p| plain.hard[p]).collect();
        let llr: Vec<f64> = pos.iter().map(|&p| plain.llr[p]).collect();
        let mut u = hard.clone();
        polar_transform_in_place(&mut u);
        ensure(out.handoff_hard == hard && out.handoff_llr == llr, || {
            format!("frame {t}: hand-off differs")
        })?;
        ensure(out.result.hard_bits() == cs.polar().gather(&u), || {
            format!("frame {t}: bits differ")
        })?;
    }

    let (ebn0, frames) = (7.0, 200_000);
    let concat = run_sweep_code(
        &all_frames(Scheme::Concat, ChannelKind::Awgn, vec![ebn0], frames),
        &SimCode::Concat(cs.clone()),
    )
    .map_err(|e| e.to_string())?;
    let ldpc = run_sweep_code(
        &all_frames(Scheme::Ldpc, ChannelKind::Awgn, vec![ebn0], frames),
        &base,
    )
    .map_err(|e| e.to_string())?;
    let (x, y) = (concat[0].block_errors, ldpc[0].block_errors);
    // Given x + y block errors and equal frame counts, x ~ Bin(x + y, 1/2)
    // when both schemes have the same BLER.
    let p = if x + y == 0 {
        1.0
    } else {
        Binomial::new(0.5, x + y).unwrap().cdf(x)
    };
    ensure(x < y && p < 0.01, || {
        format!(
            "{ebn0} dB: concatenated {x} vs LDPC {y} block errors in {frames} frames (p = {p:.3})"
        )
    })?;
    Ok(format!(
        "R_eff {:.5}; 200 frames recovered; hand-off bit-exact; {ebn0} dB BLER {:.1e} vs {:.1e} (p = {p:.1e})",
        cs.r_eff(),
        concat[0].bler,
        ldpc[0].bler
    ))
}

fn c11_ani() -> Outcome {
    let build = ConcatBuild::standard(10, 1);
    let cs = build_concat(&build).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let meta = outer_spec_record(&cs, &build).map_err(|e| e.to_string())?;
    let spec = ConcatSpecFile::save(&cs, &meta, dir.path(), "scaled").map_err(|e| e.to_string())?;
    let mut cfg = SweepConfig::new(
        Scheme::Concat,
        ChannelKind::Awgn,
        vec![5.0, 5.5, 6.0, 6.5],
        20_000,
    );
    cfg.spec = spec;
    cfg.output = Some(dir.path().join("ani"));
    run_sweep(&cfg).map_err(|e| e.to_string())?;

    let mut reader = csv::Reader::from_path(OutputPaths::from_stem(&dir.path().join("ani")).csv)
        .map_err(|e| e.to_string())?;
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or(format!("no {name} column"))
    };
    let (c_param, c_ldpc, c_polar) = (col("param")?, col("ani_ldpc")?, col("ani_polar")?);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let num = |c: usize| {
            rec[c]
                .parse::<f64>()
                .map_err(|e| format!("{:?}: {e}", &rec[c]))
        };
        rows.push((num(c_param)?, num(c_ldpc)?, num(c_polar)?));
    }
    ensure(rows.len() == 4, || format!("{} rows written", rows.len()))?;
    for &(db, l, p) in &rows {
        ensure(
            l.is_finite() && p.is_finite() && l <= 60.0 && p <= 60.0,
            || format!("{db} dB: ANI ({l}, {p})"),
        )?;
    }
    for w in rows.windows(2) {
        ensure(w[1].1 < w[0].1 && w[1].2 < w[0].2, || {
            format!("ANI not decreasing: {rows:?}")
        })?;
    }
    let shown: Vec<String> = rows
        .iter()
        .map(|(db, l, p)| format!("{db:.1} dB: {l:.2}/{p:.2}"))
        .collect();
    Ok(format!("LDPC/polar ANI from the CSV: {}", shown.join(", ")))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "leaf-set equivalence",
            limit: Duration::from_secs(1),
            run: c1_leaf_sets,
        },
        Criterion {
            id: 2,
            name: "weight spectrum",
            limit: Duration::from_secs(1),
            run: c2_weight_spectrum,
        },
        Criterion {
            id: 3,
            name: "girth",
            limit: Duration::from_secs(30),
            run: c3_girth,
        },
        Criterion {
            id: 4,
            name: "stopping-distance oracle",
            limit: Duration::from_secs(600),
            run: c4_stopping_distance,
        },
        Criterion {
            id: 5,
            name: "MVSS lower bound",
            limit: Duration::from_secs(300),
            run: c5_mvss_bound,
        },
        Criterion {
            id: 6,
            name: "low-weight count bound",
            limit: Duration::from_secs(1),
            run: c6_low_weight,
        },
        Criterion {
            id: 7,
            name: "BP equals peeling on BEC",
            limit: Duration::from_secs(120),
            run: c7_bp_equals_peeling,
        },
        Criterion {
            id: 8,
            name: "BP vs SC on BEC",
            limit: Duration::from_secs(600),
            run: c8_bp_vs_sc,
        },
        Criterion {
            id: 9,
            name: "new-rule experiment",
            limit: Duration::from_secs(3600),
            run: c9_new_rule,
        },
        Criterion {
            id: 10,
            name: "concatenated pipeline",
            limit: Duration::from_secs(4 * 3600),
            run: c10_concatenation,
        },
        Criterion {
            id: 11,
            name: "ANI accounting",
            limit: Duration::from_secs(3600),
            run: c11_ani,
        },
    ];
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = 0;
    for c in criteria
        .iter()
        .filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id)))
    {
        let t = Instant::now();
        let outcome = (c.run)();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; exceeded {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {}: {} ({detail}) [{elapsed:.2?}]",
                c.id, c.name
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL criterion {}: {} ({why}) [{elapsed:.2?}]",
                    c.id, c.name
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
