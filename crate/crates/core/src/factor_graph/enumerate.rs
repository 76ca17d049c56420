//! Exhaustive stopping-set search for small graphs.
//!
//! Every code-bit erasure pattern is peeled to its fixpoint, the largest
//! stopping set among the erased variables. Patterns are visited in order of
//! increasing weight, so the first pattern producing a given kind of
//! residual has minimum size.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FactorGraph;
use crate::decoders::Peeler;
use crate::error::{Error, Result};
use crate::polar::CodeSpec;

/// Largest depth accepted by the exhaustive routines (`2^16` patterns).
pub const ENUMERATION_MAX_DEPTH: usize = 4;

/// Which input bits a stopping set may contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GssConstraint {
    /// Any input bit.
    Any,
    /// Only the listed inputs (an information set); the rest are frozen.
    Within(Vec<usize>),
    /// Exactly the listed inputs.
    Exactly(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStoppingSet {
    /// Sorted variable ids.
    pub var_nodes: Vec<usize>,
    /// Input rows in the set.
    pub info_bits: Vec<usize>,
    /// Code-bit rows in the set.
    pub vss: Vec<usize>,
}

impl GraphStoppingSet {
    fn from_mask(g: &FactorGraph, mask: u128) -> Self {
        let len = g.len();
        let last = g.n() * len;
        let var_nodes: Vec<usize> = (0..g.num_vars()).filter(|&v| mask >> v & 1 == 1).collect();
        let info_bits = var_nodes.iter().copied().filter(|&v| v < len).collect();
        let vss = var_nodes
            .iter()
            .filter(|&&v| v >= last)
            .map(|&v| v - last)
            .collect();
        GraphStoppingSet {
            var_nodes,
            info_bits,
            vss,
        }
    }
}

/// Size of the smallest stopping set with a prescribed set of inputs,
/// against the leaf-size bound, plus one minimizing code-bit pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoppingSetReport {
    pub j: Vec<usize>,
    pub mvss: usize,
    pub bound: usize,
    pub witness: Vec<usize>,
}

impl fmt::Display for StoppingSetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "J={:?} mvss={} bound={} witness={:?}",
            self.j, self.mvss, self.bound, self.witness
        )
    }
}

fn guard(g: &FactorGraph) -> Result<()> {
    if g.n() > ENUMERATION_MAX_DEPTH {
        return Err(Error::TooLarge {
            n: g.n(),
            max: ENUMERATION_MAX_DEPTH,
        });
    }
    Ok(())
}

fn input_mask(g: &FactorGraph, rows: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; g.len()];
    for &r in rows {
        if r >= g.len() {
            return Err(Error::IndexOutOfRange {
                index: r,
                len: g.len(),
            });
        }
        mask[r] = true;
    }
    Ok(mask)
}

/// Code-bit patterns of `len` bits grouped by weight.
fn patterns_by_weight(len: usize) -> Vec<Vec<u32>> {
    let mut buckets = vec![Vec::new(); len + 1];
    for p in 0..1u32 << len {
        buckets[p.count_ones() as usize].push(p);
    }
    buckets
}

fn erased_of(pattern: u32, len: usize) -> Vec<bool> {
    (0..len).map(|i| pattern >> i & 1 == 1).collect()
}

fn to_bits(mask: &[bool]) -> u128 {
    mask.iter()
        .enumerate()
        .fold(0u128, |acc, (v, &e)| if e { acc | 1 << v } else { acc })
}

fn residual(peeler: &mut Peeler<'_>, known: &[bool], pattern: u32, len: usize) -> u128 {
    let mask = peeler
        .run(known, &erased_of(pattern, len))
        .expect("masks sized to the graph");
    to_bits(mask)
}

/// All stopping sets that are minimal under inclusion among the peeling
/// fixpoints of code-bit erasure patterns, subject to `constraint`.
pub fn enumerate_gss(g: &FactorGraph, constraint: &GssConstraint) -> Result<Vec<GraphStoppingSet>> {
    guard(g)?;
    let len = g.len();
    let (known, exact) = match constraint {
        GssConstraint::Any => (vec![false; len], None),
        GssConstraint::Within(a) => (input_mask(g, a)?.iter().map(|&x| !x).collect(), None),
        GssConstraint::Exactly(j) => {
            let allowed = input_mask(g, j)?;
            let j_bits = to_bits(&allowed);
            (
                allowed.iter().map(|&x| !x).collect::<Vec<_>>(),
                Some(j_bits),
            )
        }
    };
    let inputs = (1u128 << len) - 1;

    let ordered: Vec<u32> = patterns_by_weight(len).into_iter().flatten().collect();
    let residuals: Vec<u128> = ordered
        .par_iter()
        .map_init(|| Peeler::new(g), |p, &pat| residual(p, &known, pat, len))
        .collect();

    let mut kept: Vec<u128> = Vec::new();
    for r in residuals {
        if r == 0 {
            continue;
        }
        if let Some(j) = exact {
            if r & inputs != j {
                continue;
            }
        }
        if kept.iter().any(|&k| k & !r == 0) {
            continue;
        }
        kept.push(r);
    }
    Ok(kept
        .into_iter()
        .map(|m| GraphStoppingSet::from_mask(g, m))
        .collect())
}

/// Smallest number of code bits whose erasure leaves a stopping set with
/// exactly the inputs `j`, checked exhaustively.
pub fn mvss_size(g: &FactorGraph, j: &[usize]) -> Result<usize> {
    Ok(mvss_search(g, j)?.0)
}

fn mvss_search(g: &FactorGraph, j: &[usize]) -> Result<(usize, u32)> {
    guard(g)?;
    if j.is_empty() {
        return Err(Error::EmptySet);
    }
    let len = g.len();
    let allowed = input_mask(g, j)?;
    let j_bits = to_bits(&allowed);
    let known: Vec<bool> = allowed.iter().map(|&x| !x).collect();
    let inputs = (1u128 << len) - 1;
    let mut peeler = Peeler::new(g);
    for (w, bucket) in patterns_by_weight(len).iter().enumerate() {
        for &pat in bucket {
            if residual(&mut peeler, &known, pat, len) & inputs == j_bits {
                return Ok((w, pat));
            }
        }
    }
    unreachable!("erasing every code bit exposes the union of the stopping trees of J")
}

pub fn mvss_report(g: &FactorGraph, j: &[usize]) -> Result<StoppingSetReport> {
    let (mvss, pat) = mvss_search(g, j)?;
    let mut j_sorted = j.to_vec();
    j_sorted.sort_unstable();
    Ok(StoppingSetReport {
        bound: j
            .iter()
            .map(|&i| 1usize << i.count_ones())
            .min()
            .expect("non-empty"),
        j: j_sorted,
        mvss,
        witness: (0..g.len()).filter(|&i| pat >> i & 1 == 1).collect(),
    })
}

/// Size of the smallest code-bit erasure pattern that BP cannot fully
/// undo for `spec`, checked exhaustively.
pub fn enumerated_stopping_distance(g: &FactorGraph, spec: &CodeSpec) -> Result<usize> {
    guard(g)?;
    if spec.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            actual: spec.len(),
        });
    }
    if spec.k() == 0 {
        return Err(Error::EmptySet);
    }
    let len = g.len();
    let mut peeler = Peeler::new(g);
    for (w, bucket) in patterns_by_weight(len).iter().enumerate().skip(1) {
        for &pat in bucket {
            if residual(&mut peeler, spec.frozen_mask(), pat, len) != 0 {
                return Ok(w);
            }
        }
    }
    unreachable!("erasing every code bit leaves the information bits unresolved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor_graph::{stopping_distance, stopping_tree};

    fn as_mask(g: &FactorGraph, nodes: &[usize]) -> Vec<bool> {
        let mut m = vec![false; g.num_vars()];
        nodes.iter().for_each(|&v| m[v] = true);
        m
    }

    #[test]
    fn depth_guard() {
        let g = FactorGraph::build(5).unwrap();
        assert!(matches!(
            enumerate_gss(&g, &GssConstraint::Any),
            Err(Error::TooLarge { n: 5, max: 4 })
        ));
    }

    #[test]
    fn depth_one_sets() {
        let g = FactorGraph::build(1).unwrap();
        let sets = enumerate_gss(&g, &GssConstraint::Any).unwrap();
        let path = stopping_tree(&g, 0).unwrap();
        assert!(sets.iter().any(|s| s.var_nodes == path.nodes));
        assert!(sets.iter().all(|s| !s.vss.is_empty()));
    }

    #[test]
    fn enumerated_sets_are_stopping_sets_spanning_all_columns() {
        for n in 1..=4 {
            let g = FactorGraph::build(n).unwrap();
            let sets = enumerate_gss(&g, &GssConstraint::Any).unwrap();
            assert!(!sets.is_empty());
            for s in &sets {
                assert!(g.is_stopping_set(&as_mask(&g, &s.var_nodes)));
                assert!(!s.info_bits.is_empty() && !s.vss.is_empty());
                for col in 0..=n {
                    assert!(s.var_nodes.iter().any(|&v| g.position(v).0 == col));
                }
            }
        }
    }

    #[test]
    fn single_input_sets_are_the_stopping_trees() {
        for n in 1..=4 {
            let g = FactorGraph::build(n).unwrap();
            for i in 0..g.len() {
                let sets = enumerate_gss(&g, &GssConstraint::Exactly(vec![i])).unwrap();
                assert_eq!(sets.len(), 1, "n={n} i={i}");
                assert_eq!(sets[0].var_nodes, stopping_tree(&g, i).unwrap().nodes);
            }
        }
    }

    #[test]
    fn sets_decompose_into_half_graphs() {
        for n in 2..=4 {
            let g = FactorGraph::build(n).unwrap();
            let half_graph = FactorGraph::build(n - 1).unwrap();
            let len = g.len();
            for s in enumerate_gss(&g, &GssConstraint::Any).unwrap() {
                let mut any = false;
                for base in [0, len / 2] {
                    let mut mask = vec![false; half_graph.num_vars()];
                    let mut count = 0;
                    for &v in &s.var_nodes {
                        let (col, row) = g.position(v);
                        if col >= 1 && (base..base + len / 2).contains(&row) {
                            mask[half_graph.var_id(col - 1, row - base)] = true;
                            count += 1;
                        }
                    }
                    if count > 0 {
                        any = true;
                        assert!(half_graph.is_stopping_set(&mask));
                    }
                }
                assert!(any);
            }
        }
    }

    #[test]
    fn mvss_of_single_bits_is_leaf_size() {
        let g = FactorGraph::build(3).unwrap();
        for i in 0..8 {
            let r = mvss_report(&g, &[i]).unwrap();
            assert_eq!(r.mvss, 1 << i.count_ones());
            assert_eq!(r.mvss, r.bound);
            assert_eq!(r.witness, stopping_tree(&g, i).unwrap().leaf_set);
        }
        assert!(mvss_size(&g, &[]).is_err());
        let line = mvss_report(&g, &[3, 5]).unwrap().to_string();
        assert!(line.starts_with("J=[3, 5] mvss=4 bound=4"));
    }

    #[test]
    fn enumerated_distance_small_codes() {
        let g = FactorGraph::build(3).unwrap();
        for info in [vec![7], vec![3, 5, 6, 7], vec![1, 6], (0..8).collect()] {
            let spec = CodeSpec::new(3, info).unwrap();
            assert_eq!(
                enumerated_stopping_distance(&g, &spec).unwrap(),
                stopping_distance(&spec).unwrap()
            );
        }
    }
}
