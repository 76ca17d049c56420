//! Progressive edge growth.
//!
//! Variables are connected in order of decreasing degree. Each new edge of a
//! variable goes to a check with spare capacity that is as far from it as
//! possible in the graph built so far, preferring the check with the most
//! spare capacity and breaking remaining ties at random. The search around a
//! variable stops before a layer that would bring the number of edges
//! scanned past [`VISIT_BUDGET`].
//!
//! A final pass removes 4-cycles by degree-preserving edge swaps where it
//! can find one that creates no new 4-cycle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DegreeDistribution, ParityCheckMatrix};
use crate::error::{Error, Result};

pub const VISIT_BUDGET: usize = 8192;

/// Random swap partners tried for each edge on a 4-cycle.
const SWAP_ATTEMPTS: usize = 64;

/// Node counts per degree by largest remainder, summing to `total`.
fn apportion(fractions: &[(usize, f64)], total: usize) -> Vec<(usize, usize)> {
    let exact: Vec<f64> = fractions.iter().map(|&(_, f)| f * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut short = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..exact.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    for &i in order.iter().cycle() {
        if short == 0 {
            break;
        }
        counts[i] += 1;
        short -= 1;
    }
    fractions.iter().map(|t| t.0).zip(counts).collect()
}

/// Moves nodes between degrees of the list until the edge total changes by
/// `delta`, taking the largest admissible step each time.
fn rebalance(counts: &mut [(usize, usize)], mut delta: i64) -> bool {
    while delta != 0 {
        let mut best: Option<(usize, usize, i64)> = None;
        for (i, &(da, ca)) in counts.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &(db, _)) in counts.iter().enumerate() {
                let step = db as i64 - da as i64;
                if step == 0 || step.signum() != delta.signum() || step.abs() > delta.abs() {
                    continue;
                }
                if best.is_none_or(|b| step.abs() > b.2.abs()) {
                    best = Some((i, j, step));
                }
            }
        }
        let Some((i, j, step)) = best else {
            return false;
        };
        counts[i].1 -= 1;
        counts[j].1 += 1;
        delta -= step;
    }
    true
}

fn edges(counts: &[(usize, usize)]) -> i64 {
    counts.iter().map(|&(d, c)| (d * c) as i64).sum()
}

fn expand(counts: &[(usize, usize)]) -> Vec<usize> {
    counts
        .iter()
        .flat_map(|&(d, c)| std::iter::repeat_n(d, c))
        .collect()
}

/// Variable and check degree sequences realizing `dist` with `n_l` code
/// bits and `m` checks.
fn degree_sequences(
    dist: &DegreeDistribution,
    n_l: usize,
    m: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut var = apportion(&dist.variable_node_fractions(), n_l);
    let mut chk = apportion(&dist.check_node_fractions(), m);
    let gap = edges(&chk) - edges(&var);
    // Rounding each class count moves its edge total by less than one node.
    let slack: i64 = var.iter().chain(&chk).map(|&(d, _)| d as i64).sum();
    if gap.abs() > slack || !rebalance(&mut var, gap) && !rebalance(&mut chk, -gap) {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "cannot match {} variable edges with {} check edges",
            edges(&var),
            edges(&chk)
        )));
    }
    let mut var = expand(&var);
    var.reverse();
    let chk = expand(&chk);
    if let Some(&d) = var.iter().max().filter(|&&d| d > m) {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "variable degree {d} exceeds {m} checks"
        )));
    }
    if let Some(&d) = chk.iter().max().filter(|&&d| d > n_l) {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "check degree {d} exceeds {n_l} code bits"
        )));
    }
    Ok((var, chk))
}

struct Peg {
    var_adj: Vec<Vec<usize>>,
    chk_adj: Vec<Vec<usize>>,
    capacity: Vec<usize>,
    var_stamp: Vec<u32>,
    chk_stamp: Vec<u32>,
    stamp: u32,
    /// Checks with spare capacity.
    open: usize,
    rng: ChaCha8Rng,
}

impl Peg {
    fn spare(&self, c: usize) -> usize {
        self.capacity[c] - self.chk_adj[c].len()
    }

    /// Best of `candidates` by spare capacity, ties broken uniformly.
    fn pick(&mut self, candidates: impl Iterator<Item = usize> + Clone) -> Option<usize> {
        let best_spare = candidates
            .clone()
            .map(|c| self.spare(c))
            .max()
            .filter(|&s| s > 0)?;
        let ties = candidates
            .clone()
            .filter(|&c| self.spare(c) == best_spare)
            .count();
        let k = self.rng.random_range(0..ties);
        candidates.filter(|&c| self.spare(c) == best_spare).nth(k)
    }

    /// Check for the next edge of `v`.
    fn choose(&mut self, v: usize) -> Option<usize> {
        if self.var_adj[v].is_empty() {
            return self.pick(0..self.chk_adj.len());
        }
        self.stamp += 1;
        let stamp = self.stamp;
        self.var_stamp[v] = stamp;
        let mut frontier: Vec<usize> = self.var_adj[v].clone();
        for &c in &frontier {
            self.chk_stamp[c] = stamp;
        }
        let open = self.open;
        let mut reached = frontier.iter().filter(|&&c| self.spare(c) > 0).count();
        let mut visits = 0;
        loop {
            visits += frontier
                .iter()
                .map(|&c| self.chk_adj[c].len())
                .sum::<usize>();
            if visits > VISIT_BUDGET {
                break;
            }
            let mut next = Vec::new();
            for &c in &frontier {
                for &w in &self.chk_adj[c] {
                    if self.var_stamp[w] == stamp {
                        continue;
                    }
                    self.var_stamp[w] = stamp;
                    for &c2 in &self.var_adj[w] {
                        if self.chk_stamp[c2] != stamp {
                            self.chk_stamp[c2] = stamp;
                            next.push(c2);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            reached += next.iter().filter(|&&c| self.spare(c) > 0).count();
            if reached == open {
                let layer_has_spare = next.iter().any(|&c| self.spare(c) > 0);
                if layer_has_spare {
                    return self.pick(next.iter().copied());
                }
                // Every open check is adjacent to v already.
                return None;
            }
            frontier = next;
        }
        let chk_stamp = std::mem::take(&mut self.chk_stamp);
        let picked = self.pick((0..chk_stamp.len()).filter(|&c| chk_stamp[c] != stamp));
        self.chk_stamp = chk_stamp;
        picked
    }
}

impl Peg {
    fn link(&mut self, v: usize, c: usize) {
        self.var_adj[v].push(c);
        self.chk_adj[c].push(v);
        if self.spare(c) == 0 {
            self.open -= 1;
        }
    }

    fn unlink(&mut self, v: usize, c: usize) {
        if self.spare(c) == 0 {
            self.open += 1;
        }
        let i = self.var_adj[v]
            .iter()
            .position(|&x| x == c)
            .expect("edge present");
        self.var_adj[v].swap_remove(i);
        let i = self.chk_adj[c]
            .iter()
            .position(|&x| x == v)
            .expect("edge present");
        self.chk_adj[c].swap_remove(i);
    }

    fn mark_checks_of(&mut self, v: usize) -> u32 {
        self.stamp += 1;
        for &c in &self.var_adj[v] {
            self.chk_stamp[c] = self.stamp;
        }
        self.stamp
    }

    /// Adding the edge `(v, c)` would close a 4-cycle.
    fn closes_four_cycle(&mut self, v: usize, c: usize) -> bool {
        let stamp = self.mark_checks_of(v);
        self.chk_adj[c].iter().filter(|&&w| w != v).any(|&w| {
            self.var_adj[w]
                .iter()
                .any(|&c2| self.chk_stamp[c2] == stamp)
        })
    }

    /// A check of `v` lying on a 4-cycle through `v`.
    fn check_on_four_cycle(&mut self, v: usize) -> Option<usize> {
        let checks = self.var_adj[v].clone();
        checks.into_iter().find(|&c| {
            self.unlink(v, c);
            let hit = self.closes_four_cycle(v, c);
            self.link(v, c);
            hit
        })
    }

    /// Replaces `(v, c)` and some `(x, c2)` by `(v, c2)` and `(x, c)`.
    fn swap_away(&mut self, v: usize, c: usize) -> bool {
        let m = self.chk_adj.len();
        for _ in 0..SWAP_ATTEMPTS {
            let c2 = self.rng.random_range(0..m);
            if c2 == c || self.var_adj[v].contains(&c2) || self.chk_adj[c2].is_empty() {
                continue;
            }
            let x = self.chk_adj[c2][self.rng.random_range(0..self.chk_adj[c2].len())];
            if x == v || self.var_adj[x].contains(&c) {
                continue;
            }
            self.unlink(v, c);
            self.unlink(x, c2);
            if !self.closes_four_cycle(v, c2) {
                self.link(v, c2);
                if !self.closes_four_cycle(x, c) {
                    self.link(x, c);
                    return true;
                }
                self.unlink(v, c2);
            }
            self.link(v, c);
            self.link(x, c2);
        }
        false
    }

    fn remove_four_cycles(&mut self) {
        for _ in 0..3 {
            let mut changed = false;
            for v in 0..self.var_adj.len() {
                while let Some(c) = self.check_on_four_cycle(v) {
                    if !self.swap_away(v, c) {
                        break;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// PEG parity-check matrix with `N_l = n_l` code bits and
/// `M = round(n_l·(1 − rate))` checks whose degree sequence follows `dist`.
pub fn construct_peg(
    dist: &DegreeDistribution,
    n_l: usize,
    rate: f64,
    seed: u64,
) -> Result<ParityCheckMatrix> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::param(format!("rate {rate} outside (0, 1)")));
    }
    let m = (n_l as f64 * (1.0 - rate)).round() as usize;
    if m == 0 || m >= n_l {
        return Err(Error::param(format!(
            "length {n_l} at rate {rate} gives {m} checks"
        )));
    }
    let (var_deg, chk_deg) = degree_sequences(dist, n_l, m)?;
    let mut peg = Peg {
        var_adj: vec![Vec::new(); n_l],
        chk_adj: vec![Vec::new(); m],
        capacity: chk_deg,
        var_stamp: vec![0; n_l],
        chk_stamp: vec![0; m],
        stamp: 0,
        open: m,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    for (v, &d) in var_deg.iter().enumerate() {
        for _ in 0..d {
            let c = peg.choose(v).ok_or_else(|| {
                Error::InfeasibleDegreeSequence(format!("no check left for variable {v}"))
            })?;
            peg.link(v, c);
        }
    }
    peg.remove_four_cycles();
    ParityCheckMatrix::from_rows(n_l, peg.chk_adj, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor_graph::shortest_cycle;

    #[test]
    fn apportion_sums() {
        let a = apportion(&[(2, 0.3333), (3, 0.3333), (4, 0.3334)], 10);
        assert_eq!(a.iter().map(|t| t.1).sum::<usize>(), 10);
        assert_eq!(apportion(&[(3, 1.0)], 7), vec![(3, 7)]);
    }

    #[test]
    fn rebalance_steps() {
        let mut c = vec![(2, 10), (3, 10), (13, 10)];
        assert!(rebalance(&mut c, 25));
        assert_eq!(edges(&c), 20 + 30 + 130 + 25);
        let mut single = vec![(3, 10)];
        assert!(!rebalance(&mut single, 1));
        assert!(rebalance(&mut single, 0));
    }

    #[test]
    fn regular_3_6() {
        let h = construct_peg(&DegreeDistribution::regular(3, 6).unwrap(), 1000, 0.5, 1).unwrap();
        assert_eq!(h.m(), 500);
        assert!(h.cols().iter().all(|c| c.len() == 3));
        assert!(h.rows().iter().all(|r| r.len() == 6));
        assert!(shortest_cycle(&h.tanner_adjacency(), usize::MAX).unwrap() >= 6);
    }

    #[test]
    fn deterministic_in_seed() {
        let d = DegreeDistribution::optical();
        let a = construct_peg(&d, 2000, 0.93, 7).unwrap();
        let b = construct_peg(&d, 2000, 0.93, 7).unwrap();
        let c = construct_peg(&d, 2000, 0.93, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.rows(), c.rows());
        assert_eq!(a.seed(), Some(7));
    }

    #[test]
    fn infeasible_sequences() {
        // Check degree 72 cannot absorb the edges of rate 0.95.
        assert!(matches!(
            construct_peg(&DegreeDistribution::optical(), 2000, 0.95, 1),
            Err(Error::InfeasibleDegreeSequence(_))
        ));
        assert!(construct_peg(&DegreeDistribution::regular(3, 6).unwrap(), 1000, 1.0, 1).is_err());
        assert!(construct_peg(&DegreeDistribution::regular(3, 6).unwrap(), 4, 0.5, 1).is_err());
    }
}
