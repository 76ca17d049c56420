use std::path::PathBuf;

use clap::Args;
use polarfec::factor_graph::{
    enumerated_stopping_distance, girth, low_weight_table, size_distributions, stopping_distance,
    FactorGraph, ENUMERATION_MAX_DEPTH,
};
use polarfec::polar::{row_weight, CodeSpecFile};
use serde_json::{json, Map, Value};

use crate::{print_json, CliError, CliResult};

#[derive(Args, Debug)]
pub struct Analyze {
    /// Depth of `T_n`; taken from `--spec` when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Polar spec to report stopping distance for.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    girth: bool,
    /// Stopping-tree and leaf-set size distributions.
    #[arg(long)]
    sizes: bool,
    /// Low-weight counts against `N^H(ε)` for n = 8..=16.
    #[arg(long)]
    low_weight: bool,
    /// Exhaustive stopping-distance check (small N only).
    #[arg(long)]
    enumerate: bool,
}

const LOW_WEIGHT_EPS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.45];

pub fn run(a: Analyze) -> CliResult<()> {
    let spec = match &a.spec {
        Some(p) => Some(
            CodeSpecFile::load(p)
                .and_then(|f| f.to_spec())
                .map_err(CliError::config)?,
        ),
        None => None,
    };
    let n = match (a.n, &spec) {
        (Some(n), Some(s)) if n != s.n() => {
            return Err(CliError::config(format!(
                "--n {n} disagrees with the spec depth {}",
                s.n()
            )));
        }
        (Some(n), _) => n,
        (None, Some(s)) => s.n(),
        (None, None) => return Err(CliError::config("give --n or --spec")),
    };
    let all = !(a.girth || a.sizes || a.low_weight || a.enumerate);
    let g = FactorGraph::build(n).map_err(CliError::config)?;
    let mut out = Map::new();
    out.insert("n".into(), json!(n));
    out.insert("variables".into(), json!(g.num_vars()));
    out.insert("checks".into(), json!(g.num_checks()));
    if a.girth || all {
        out.insert("girth".into(), json!(girth(&g)));
    }
    if a.sizes || all {
        let (tree, leaf) = size_distributions(n);
        out.insert("stopping_tree_sizes".into(), json!(tree));
        out.insert("leaf_set_sizes".into(), json!(leaf));
    }
    if a.low_weight || all {
        let ns: Vec<usize> = (8..=16).collect();
        let rows = low_weight_table(&ns, &LOW_WEIGHT_EPS).map_err(CliError::runtime)?;
        let rows: Vec<Value> = rows
            .iter()
            .map(|r| json!({"n": r.n, "eps": r.eps, "count": r.count, "bound": r.bound, "holds": r.holds()}))
            .collect();
        out.insert("low_weight".into(), json!(rows));
    }
    if let Some(s) = &spec {
        let d = stopping_distance(s).map_err(CliError::runtime)?;
        let min_weight = s
            .info_set()
            .iter()
            .map(|&i| row_weight(i, n).unwrap_or(0))
            .min();
        out.insert("k".into(), json!(s.k()));
        out.insert("stopping_distance".into(), json!(d));
        out.insert("min_row_weight".into(), json!(min_weight));
        if a.enumerate || (all && n <= ENUMERATION_MAX_DEPTH) {
            if n > ENUMERATION_MAX_DEPTH {
                return Err(CliError::config(format!(
                    "enumeration is limited to n <= {ENUMERATION_MAX_DEPTH}"
                )));
            }
            let e = enumerated_stopping_distance(&g, s).map_err(CliError::runtime)?;
            out.insert("enumerated_stopping_distance".into(), json!(e));
        }
    } else if a.enumerate {
        return Err(CliError::config("--enumerate needs --spec"));
    }
    print_json(&Value::Object(out))
}
