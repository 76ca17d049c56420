use crate::error::{Error, Result};
use crate::factor_graph::FactorGraph;

/// Reusable workspace for the erasure peeling decoder on `T_n`.
#[derive(Debug, Clone)]
pub struct Peeler<'g> {
    g: &'g FactorGraph,
    erased: Vec<bool>,
    pending: Vec<u8>,
    queue: Vec<usize>,
}

impl<'g> Peeler<'g> {
    pub fn new(g: &'g FactorGraph) -> Self {
        Peeler {
            g,
            erased: vec![false; g.num_vars()],
            pending: vec![0; g.num_checks()],
            queue: Vec::new(),
        }
    }

    /// Runs peeling to its fixpoint and returns the erased-variable mask.
    ///
    /// Inputs with `known_inputs[i]` set and code bits with
    /// `erased_codebits[i]` clear start known; every other variable starts
    /// erased. A check with a single erased neighbour resolves it.
    pub fn run(&mut self, known_inputs: &[bool], erased_codebits: &[bool]) -> Result<&[bool]> {
        let g = self.g;
        let len = g.len();
        for mask in [known_inputs, erased_codebits] {
            if mask.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: mask.len(),
                });
            }
        }
        let last = g.n() * len;
        self.erased.fill(true);
        for i in 0..len {
            self.erased[i] = !known_inputs[i];
            self.erased[last + i] = erased_codebits[i];
        }
        self.queue.clear();
        for c in 0..g.num_checks() {
            let k = g
                .check_neighbors(c)
                .iter()
                .filter(|&&v| self.erased[v])
                .count() as u8;
            self.pending[c] = k;
            if k == 1 {
                self.queue.push(c);
            }
        }
        while let Some(c) = self.queue.pop() {
            if self.pending[c] != 1 {
                continue;
            }
            let v = *g
                .check_neighbors(c)
                .iter()
                .find(|&&v| self.erased[v])
                .expect("one erased neighbour");
            self.erased[v] = false;
            for &d in g.var_neighbors(v) {
                self.pending[d] -= 1;
                if self.pending[d] == 1 {
                    self.queue.push(d);
                }
            }
        }
        Ok(&self.erased)
    }
}

/// Residual erased variable ids after peeling: the largest stopping set
/// inside the initially erased variables.
pub fn peel_fixpoint(
    g: &FactorGraph,
    known_inputs: &[bool],
    erased_codebits: &[bool],
) -> Result<Vec<usize>> {
    let mut p = Peeler::new(g);
    let mask = p.run(known_inputs, erased_codebits)?;
    Ok(mask
        .iter()
        .enumerate()
        .filter_map(|(v, &e)| e.then_some(v))
        .collect())
}
