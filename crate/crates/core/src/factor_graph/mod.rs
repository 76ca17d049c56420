//! The factor graph `T_n` of a length-`2^n` polar code and its stopping-set
//! structure.
//!
//! Variable nodes `v(row, col)` live in columns `0..=n`; column 0 holds the
//! input bits `u` and column `n` the code bits `x`. Check columns are
//! `0..n`. Stage `s` joins variable columns `s` and `s + 1` through Z-shaped
//! pieces on row pairs `(a, b = a + N/2^(s+1))`:
//!
//! ```text
//!   v(a,s) ──┐
//!            c(a,s) ── v(a,s+1)      top check:    v(a,s) ⊕ v(b,s) ⊕ v(a,s+1) = 0
//!   v(b,s) ──┤
//!            c(b,s) ── v(b,s+1)      bottom check: v(b,s) = v(b,s+1)
//! ```
//!
//! Node ids are `col · N + row` in separate variable and check id spaces.

mod enumerate;
mod girth;
mod stopping;

pub use enumerate::{
    enumerate_gss, enumerated_stopping_distance, mvss_report, mvss_size, GraphStoppingSet,
    GssConstraint, StoppingSetReport, ENUMERATION_MAX_DEPTH,
};
pub use girth::{girth, shortest_cycle};
pub use stopping::{
    binary_entropy, leaf_size, low_weight_count, low_weight_table, mib, mvss_lower_bound,
    size_distributions, stopping_distance, stopping_tree, LowWeightRow, StoppingTree,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::polar::MAX_DEPTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var { col: usize, row: usize },
    Check { col: usize, row: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    n: usize,
    len: usize,
    /// Variable ids adjacent to each check.
    check_adj: Vec<Vec<usize>>,
    /// Check ids adjacent to each variable.
    var_adj: Vec<Vec<usize>>,
}

impl FactorGraph {
    pub fn build(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DEPTH {
            return Err(Error::param(format!(
                "graph depth must be in 1..={MAX_DEPTH}, got {n}"
            )));
        }
        let len = 1usize << n;
        let mut check_adj = vec![Vec::new(); n * len];
        let mut var_adj = vec![Vec::new(); (n + 1) * len];
        let var = |col: usize, row: usize| col * len + row;
        for s in 0..n {
            for (a, b) in z_pairs(n, s) {
                let top = s * len + a;
                let bottom = s * len + b;
                check_adj[top] = vec![var(s, a), var(s, b), var(s + 1, a)];
                check_adj[bottom] = vec![var(s, b), var(s + 1, b)];
            }
        }
        for (c, vars) in check_adj.iter().enumerate() {
            for &v in vars {
                var_adj[v].push(c);
            }
        }
        Ok(FactorGraph {
            n,
            len,
            check_adj,
            var_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_vars(&self) -> usize {
        self.var_adj.len()
    }

    pub fn num_checks(&self) -> usize {
        self.check_adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.check_adj.iter().map(Vec::len).sum()
    }

    pub fn var_id(&self, col: usize, row: usize) -> usize {
        debug_assert!(col <= self.n && row < self.len);
        col * self.len + row
    }

    pub fn check_id(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.n && row < self.len);
        col * self.len + row
    }

    /// `(col, row)` of a variable or check id.
    pub fn position(&self, id: usize) -> (usize, usize) {
        (id / self.len, id % self.len)
    }

    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.check_adj[check]
    }

    pub fn var_neighbors(&self, var: usize) -> &[usize] {
        &self.var_adj[var]
    }

    /// Row pairs `(a, b)` of the Zs at stage `s`, top to bottom.
    pub fn z_pairs(&self, stage: usize) -> impl Iterator<Item = (usize, usize)> {
        z_pairs(self.n, stage)
    }

    /// Whether `members` (a mask over variable ids) is a non-empty stopping
    /// set: every check touching it touches at least two members.
    pub fn is_stopping_set(&self, members: &[bool]) -> bool {
        if !members.iter().any(|&m| m) {
            return false;
        }
        self.check_adj.iter().all(|vars| {
            let k = vars.iter().filter(|&&v| members[v]).count();
            k == 0 || k >= 2
        })
    }

    /// Evaluates every variable column from the inputs by applying the
    /// check equations column by column; returns column `n`.
    pub fn evaluate(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: u.len(),
            });
        }
        let mut values = vec![0u8; self.num_vars()];
        values[..self.len].copy_from_slice(u);
        for col in 0..self.n {
            for row in 0..self.len {
                let vars = &self.check_adj[self.check_id(col, row)];
                let (right, left): (Vec<usize>, Vec<usize>) =
                    vars.iter().partition(|&&v| v / self.len == col + 1);
                let x = left.iter().fold(0u8, |acc, &v| acc ^ values[v]);
                values[right[0]] = x;
            }
        }
        Ok(values[self.n * self.len..].to_vec())
    }

    /// Single adjacency list over all nodes: variables first, then checks
    /// offset by `num_vars()`.
    pub fn to_adjacency(&self) -> Vec<Vec<usize>> {
        let offset = self.num_vars();
        let mut adj: Vec<Vec<usize>> = self
            .var_adj
            .iter()
            .map(|cs| cs.iter().map(|&c| c + offset).collect())
            .collect();
        adj.extend(self.check_adj.iter().cloned());
        adj
    }

    /// Plain-text export: one line per check, `c(col,row): v(col,row) ...`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# polar factor graph n={} N={}\n", self.n, self.len);
        for (c, vars) in self.check_adj.iter().enumerate() {
            let (col, row) = self.position(c);
            let _ = write!(out, "c({col},{row}):");
            for &v in vars {
                let (vc, vr) = self.position(v);
                let _ = write!(out, " v({vc},{vr})");
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn z_pairs(n: usize, stage: usize) -> impl Iterator<Item = (usize, usize)> {
    let len = 1usize << n;
    let half = len >> (stage + 1);
    (0..len)
        .step_by(2 * half)
        .flat_map(move |start| (start..start + half).map(move |a| (a, a + half)))
}
