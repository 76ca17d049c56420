use serde::{Deserialize, Serialize};

use super::FactorGraph;
use crate::error::{Error, Result};
use crate::polar::CodeSpec;

/// The stopping tree rooted at input bit `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingTree {
    pub root: usize,
    /// Sorted variable ids.
    pub nodes: Vec<usize>,
    /// Sorted code-bit rows.
    pub leaf_set: Vec<usize>,
}

impl StoppingTree {
    /// Leaf-set size `f(root)`.
    pub fn f(&self) -> usize {
        self.leaf_set.len()
    }
}

/// Walks right from `v(i, 0)`. A node on the top row of its Z only reaches
/// the top right node; a node on the bottom row needs both right nodes.
pub fn stopping_tree(g: &FactorGraph, i: usize) -> Result<StoppingTree> {
    let len = g.len();
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    let n = g.n();
    let mut nodes = vec![g.var_id(0, i)];
    let mut frontier = vec![i];
    for s in 0..n {
        let half = len >> (s + 1);
        let mut next = Vec::with_capacity(2 * frontier.len());
        for &r in &frontier {
            next.push(r);
            if r & half != 0 {
                next.push(r - half);
            }
        }
        next.sort_unstable();
        next.dedup();
        nodes.extend(next.iter().map(|&r| g.var_id(s + 1, r)));
        frontier = next;
    }
    nodes.sort_unstable();
    Ok(StoppingTree {
        root: i,
        nodes,
        leaf_set: frontier,
    })
}

fn check_index(i: usize, n: usize) -> Result<()> {
    let len = 1usize << n;
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    Ok(())
}

/// `f(i)` from the 1-based recursion `f(2^l) = 2^l`, `f(2^l + m) = 2 f(m)`
/// with `p = i + 1`.
pub fn leaf_size(i: usize, n: usize) -> Result<usize> {
    check_index(i, n)?;
    fn f(p: usize) -> usize {
        if p.is_power_of_two() {
            p
        } else {
            let l = usize::BITS - 1 - p.leading_zeros();
            2 * f(p - (1 << l))
        }
    }
    Ok(f(i + 1))
}

/// `(A_n, B_n)`: stopping-tree node counts and leaf-set sizes for every
/// input, from `A_{k+1} = [A_k, 2A_k] + 1` and `B_{k+1} = [B_k, 2B_k]`.
pub fn size_distributions(n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut a = vec![1usize];
    let mut b = vec![1usize];
    for _ in 0..n {
        let next_a: Vec<usize> = a
            .iter()
            .chain(a.iter())
            .enumerate()
            .map(|(k, &x)| if k < a.len() { x + 1 } else { 2 * x + 1 })
            .collect();
        let next_b: Vec<usize> = b
            .iter()
            .chain(b.iter())
            .enumerate()
            .map(|(k, &x)| if k < b.len() { x } else { 2 * x })
            .collect();
        a = next_a;
        b = next_b;
    }
    (a, b)
}

/// Size of the smallest variable-node stopping set: `min_{i∈𝒜} f(i)`.
/// Equals the minimum distance of the code.
pub fn stopping_distance(spec: &CodeSpec) -> Result<usize> {
    spec.info_set()
        .iter()
        .map(|&i| 1usize << i.count_ones())
        .min()
        .ok_or(Error::EmptySet)
}

fn check_subset(spec: &CodeSpec, j: &[usize]) -> Result<()> {
    if j.is_empty() {
        return Err(Error::EmptySet);
    }
    for &i in j {
        check_index(i, spec.n())?;
        if spec.is_frozen(i) {
            return Err(Error::param(format!("index {i} is not an information bit")));
        }
    }
    Ok(())
}

/// Minimum information bit of `J`: smallest `f`, largest index on ties.
pub fn mib(spec: &CodeSpec, j: &[usize]) -> Result<usize> {
    check_subset(spec, j)?;
    Ok(*j
        .iter()
        .min_by(|&&a, &&b| a.count_ones().cmp(&b.count_ones()).then(b.cmp(&a)))
        .expect("non-empty"))
}

/// Lower bound `min_{j∈J} f(j)` on the smallest stopping set whose
/// information bits are exactly `J`.
pub fn mvss_lower_bound(spec: &CodeSpec, j: &[usize]) -> Result<usize> {
    let m = mib(spec, j)?;
    Ok(1usize << m.count_ones())
}

/// Number of inputs with `f(i) < N^ε`, i.e. `popcount(i) < nε`.
pub fn low_weight_count(n: usize, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("exponent {eps} not in (0, 1/2)")));
    }
    // Tolerance keeps nε = 3.0000000000000004 from admitting k = 3.
    let threshold = n as f64 * eps;
    let mut count = 0u64;
    let mut binom = 1u64;
    for k in 0..=n {
        if (k as f64) + 1e-9 < threshold {
            count += binom;
        }
        binom = binom * (n - k) as u64 / (k + 1) as u64;
    }
    Ok(count)
}

/// `H(p) = −p log2 p − (1−p) log2 (1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowWeightRow {
    pub n: usize,
    pub eps: f64,
    pub count: u64,
    /// `N^{H(ε)}`.
    pub bound: f64,
}

impl LowWeightRow {
    pub fn holds(&self) -> bool {
        (self.count as f64) < self.bound
    }
}

/// Low-weight counts against the entropy bound for every `(n, ε)` pair.
pub fn low_weight_table(ns: &[usize], eps: &[f64]) -> Result<Vec<LowWeightRow>> {
    let mut rows = Vec::with_capacity(ns.len() * eps.len());
    for &n in ns {
        for &e in eps {
            rows.push(LowWeightRow {
                n,
                eps: e,
                count: low_weight_count(n, e)?,
                bound: 2f64.powf(n as f64 * binary_entropy(e)),
            });
        }
    }
    Ok(rows)
}
