//! Belief propagation on `T_n`.
//!
//! Each Z at stage `s` with rows `(a, b)` exchanges left-going messages `L`
//! and right-going messages `R` between variable columns `s` and `s + 1`:
//!
//! ```text
//! L[s][a]   = L[s+1][a] ⊞ (L[s+1][b] + R[s][b])
//! L[s][b]   = (R[s][a] ⊞ L[s+1][a]) + L[s+1][b]
//! R[s+1][a] = R[s][a] ⊞ (L[s+1][b] + R[s][b])
//! R[s+1][b] = (R[s][a] ⊞ L[s+1][a]) + R[s][b]
//! ```
//!
//! These are the exact sum-product messages of the Z's top (degree 3) and
//! bottom (degree 2) checks, the latter folded into the former. `L[n]` holds
//! the channel and `R[0]` the frozen-bit priors. One iteration is a sweep
//! from column `n` down to column 0 followed by a sweep back. Zs of one
//! stage touch disjoint rows, so their order within a stage is immaterial.

use serde::{Deserialize, Serialize};

use super::llr::expo;
use super::{boxplus, DecodeResult, Quantizer};
use crate::channels::ChannelOutput;
use crate::error::{Error, Result};
use crate::factor_graph::FactorGraph;
use crate::polar::{polar_transform_in_place, CodeSpec};

pub const DEFAULT_MAX_ITER: usize = 60;

/// Order in which the stages of the graph are laid out between the inputs
/// and the code bits.
///
/// Both orders realize the same transform on naturally indexed `u` and `x`.
/// `Mirrored` is `T_n` with every column's rows bit-reversed, so it is the
/// same graph with the inputs and code bits placed at bit-reversed rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageOrder {
    /// Stage `s` pairs rows `N / 2^(s+1)` apart, as in `T_n`.
    Natural,
    /// Stage `s` pairs rows `2^s` apart.
    #[default]
    Mirrored,
}

impl StageOrder {
    /// Row distance of the Zs at stage `s` of a depth-`n` graph.
    #[inline]
    pub fn half(self, n: usize, s: usize) -> usize {
        match self {
            StageOrder::Natural => 1 << (n - 1 - s),
            StageOrder::Mirrored => 1 << s,
        }
    }

    /// Row of `T_n` that holds row `row` of this layout.
    pub fn graph_row(self, n: usize, row: usize) -> usize {
        match self {
            StageOrder::Natural => row,
            StageOrder::Mirrored if n == 0 => row,
            StageOrder::Mirrored => row.reverse_bits() >> (usize::BITS as usize - n),
        }
    }

    /// Variable id of `T_n` for variable id `v` of this layout.
    pub fn graph_var(self, n: usize, v: usize) -> usize {
        let len = 1 << n;
        (v / len) * len + self.graph_row(n, v % len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpOptions {
    pub max_iter: usize,
    /// Store messages on a clamped uniform grid.
    pub quantizer: Option<Quantizer>,
    pub stage_order: StageOrder,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions {
            max_iter: DEFAULT_MAX_ITER,
            quantizer: None,
            stage_order: StageOrder::default(),
        }
    }
}

/// Decodes one block. Allocates a fresh [`BpDecoder`]; reuse one when
/// decoding many blocks.
pub fn bp_decode(
    spec: &CodeSpec,
    g: &FactorGraph,
    y: &ChannelOutput,
    opts: &BpOptions,
) -> Result<DecodeResult> {
    if g.n() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            actual: g.len(),
        });
    }
    BpDecoder::new(spec).decode(y, opts)
}

/// Representation of soft messages.
trait Domain: Copy {
    /// A message carrying no information.
    const ZERO: f64;
    fn message(self, llr: f64) -> f64;
    /// Prior of a frozen (zero) bit.
    fn frozen(self) -> f64;
    /// Check-node combination.
    fn check(a: f64, b: f64) -> f64;
    /// Variable-node combination.
    fn var(a: f64, b: f64) -> f64;
    fn store(self, x: f64) -> f64;
    /// Hard decision is 1.
    fn is_one(x: f64) -> bool;
}

/// Plain LLRs, optionally quantized after every update.
#[derive(Clone, Copy)]
struct LlrDomain(Option<Quantizer>);

impl Domain for LlrDomain {
    const ZERO: f64 = 0.0;

    fn message(self, llr: f64) -> f64 {
        self.store(llr)
    }

    fn frozen(self) -> f64 {
        self.0.map_or(f64::INFINITY, |q| q.clamp)
    }

    #[inline]
    fn check(a: f64, b: f64) -> f64 {
        boxplus(a, b)
    }

    #[inline]
    fn var(a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn store(self, x: f64) -> f64 {
        self.0.map_or(x, |q| q.quantize(x))
    }

    #[inline]
    fn is_one(x: f64) -> bool {
        x < 0.0
    }
}

/// An LLR `L` stored as `sign(L)·e^{−|L|}`; see [`expo`].
#[derive(Clone, Copy)]
struct ExpDomain;

impl Domain for ExpDomain {
    const ZERO: f64 = 1.0;

    fn message(self, llr: f64) -> f64 {
        expo::from_llr(llr)
    }

    fn frozen(self) -> f64 {
        expo::FLOOR
    }

    #[inline]
    fn check(a: f64, b: f64) -> f64 {
        expo::check(a, b)
    }

    #[inline]
    fn var(a: f64, b: f64) -> f64 {
        expo::var(a, b)
    }

    #[inline]
    fn store(self, x: f64) -> f64 {
        x
    }

    #[inline]
    fn is_one(x: f64) -> bool {
        expo::is_one(x)
    }
}

/// Message storage for BP on one code, reusable across blocks.
#[derive(Debug, Clone)]
pub struct BpDecoder {
    spec: CodeSpec,
    left: Vec<f64>,
    right: Vec<f64>,
    left_e: Vec<i8>,
    right_e: Vec<i8>,
    u_hat: Vec<u8>,
    x_check: Vec<u8>,
}

impl BpDecoder {
    pub fn new(spec: &CodeSpec) -> Self {
        BpDecoder {
            spec: spec.clone(),
            left: Vec::new(),
            right: Vec::new(),
            left_e: Vec::new(),
            right_e: Vec::new(),
            u_hat: vec![0; spec.len()],
            x_check: vec![0; spec.len()],
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn decode(&mut self, y: &ChannelOutput, opts: &BpOptions) -> Result<DecodeResult> {
        match y {
            ChannelOutput::Erasure { symbols, .. } => self.decode_erasures(symbols, opts),
            ChannelOutput::Llr { llr, .. } => self.decode_llr(llr, opts),
        }
    }

    fn check_input(&self, len: usize, max_iter: usize) -> Result<()> {
        if len != self.spec.len() {
            return Err(Error::LengthMismatch {
                expected: self.spec.len(),
                actual: len,
            });
        }
        if max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        Ok(())
    }

    /// Soft-input BP. Stops early once the decisions re-encode to the
    /// posterior hard decisions on the code bits, or once the information
    /// decisions have not changed for two consecutive iterations.
    pub fn decode_llr(&mut self, llr: &[f64], opts: &BpOptions) -> Result<DecodeResult> {
        self.check_input(llr.len(), opts.max_iter)?;
        match opts.quantizer {
            Some(q) => Ok(self.run(LlrDomain(Some(q)), llr, opts)),
            None => Ok(self.run(ExpDomain, llr, opts)),
        }
    }

    fn run<D: Domain>(&mut self, dom: D, llr: &[f64], opts: &BpOptions) -> DecodeResult {
        let n = self.spec.n();
        let len = self.spec.len();
        self.left.clear();
        self.left.resize((n + 1) * len, D::ZERO);
        self.right.clear();
        self.right.resize((n + 1) * len, D::ZERO);
        for (dst, &l) in self.left[n * len..].iter_mut().zip(llr) {
            *dst = dom.message(l);
        }
        for (i, r) in self.right[..len].iter_mut().enumerate() {
            if self.spec.is_frozen(i) {
                *r = dom.frozen();
            }
        }

        let mut prev: Vec<u8> = Vec::new();
        let mut stable = 0;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < opts.max_iter {
            iterations += 1;
            self.sweep_left(dom, opts.stage_order);
            self.sweep_right(dom, opts.stage_order);
            converged = self.decide_and_check::<D>();
            if converged {
                break;
            }
            let info = self.spec.gather(&self.u_hat);
            if info == prev {
                stable += 1;
                if stable >= 2 {
                    break;
                }
            } else {
                stable = 0;
            }
            prev = info;
        }
        DecodeResult {
            info_estimate: self
                .spec
                .gather(&self.u_hat)
                .into_iter()
                .map(Some)
                .collect(),
            iterations_used: iterations,
            converged,
            unresolved: Vec::new(),
        }
    }

    fn sweep_left<D: Domain>(&mut self, dom: D, order: StageOrder) {
        let n = self.spec.n();
        let len = self.spec.len();
        for s in (0..n).rev() {
            let half = order.half(n, s);
            let (l_lo, l_hi) = self.left.split_at_mut((s + 1) * len);
            let l_s = &mut l_lo[s * len..];
            let l_s1 = &l_hi[..len];
            let r_s = &self.right[s * len..(s + 1) * len];
            let blocks = l_s
                .chunks_exact_mut(2 * half)
                .zip(l_s1.chunks_exact(2 * half))
                .zip(r_s.chunks_exact(2 * half));
            for ((out, l1), r) in blocks {
                let (out_a, out_b) = out.split_at_mut(half);
                let (l1a, l1b) = l1.split_at(half);
                let (ra, rb) = r.split_at(half);
                for i in 0..half {
                    out_a[i] = dom.store(D::check(l1a[i], D::var(l1b[i], rb[i])));
                    out_b[i] = dom.store(D::var(D::check(ra[i], l1a[i]), l1b[i]));
                }
            }
        }
    }

    fn sweep_right<D: Domain>(&mut self, dom: D, order: StageOrder) {
        let n = self.spec.n();
        let len = self.spec.len();
        for s in 0..n {
            let half = order.half(n, s);
            let (r_lo, r_hi) = self.right.split_at_mut((s + 1) * len);
            let r_s = &r_lo[s * len..];
            let r_s1 = &mut r_hi[..len];
            let l_s1 = &self.left[(s + 1) * len..(s + 2) * len];
            let blocks = r_s1
                .chunks_exact_mut(2 * half)
                .zip(l_s1.chunks_exact(2 * half))
                .zip(r_s.chunks_exact(2 * half));
            for ((out, l1), r) in blocks {
                let (out_a, out_b) = out.split_at_mut(half);
                let (l1a, l1b) = l1.split_at(half);
                let (ra, rb) = r.split_at(half);
                for i in 0..half {
                    out_a[i] = dom.store(D::check(ra[i], D::var(l1b[i], rb[i])));
                    out_b[i] = dom.store(D::var(D::check(ra[i], l1a[i]), rb[i]));
                }
            }
        }
    }

    /// Hard decisions on `u`; true when they re-encode to the posterior
    /// hard decisions on `x`.
    fn decide_and_check<D: Domain>(&mut self) -> bool {
        let n = self.spec.n();
        let len = self.spec.len();
        for i in 0..len {
            self.u_hat[i] = if self.spec.is_frozen(i) {
                0
            } else {
                D::is_one(D::var(self.left[i], self.right[i])) as u8
            };
        }
        self.x_check.copy_from_slice(&self.u_hat);
        polar_transform_in_place(&mut self.x_check);
        let l_n = &self.left[n * len..];
        let r_n = &self.right[n * len..];
        self.x_check
            .iter()
            .zip(l_n.iter().zip(r_n))
            .all(|(&x, (&l, &r))| x == D::is_one(D::var(l, r)) as u8)
    }

    /// Erasure BP with messages in `{+1 (bit 0), −1 (bit 1), 0 (erased)}`.
    /// Runs until an iteration changes no message or `max_iter` is hit.
    /// Unresolved variables are reported as ids of `T_n`.
    pub fn decode_erasures(
        &mut self,
        symbols: &[Option<u8>],
        opts: &BpOptions,
    ) -> Result<DecodeResult> {
        let max_iter = opts.max_iter;
        let order = opts.stage_order;
        self.check_input(symbols.len(), max_iter)?;
        let n = self.spec.n();
        let len = self.spec.len();
        self.left_e.clear();
        self.left_e.resize((n + 1) * len, 0);
        self.right_e.clear();
        self.right_e.resize((n + 1) * len, 0);
        for (dst, s) in self.left_e[n * len..].iter_mut().zip(symbols) {
            *dst = match s {
                Some(0) => 1,
                Some(_) => -1,
                None => 0,
            };
        }
        for (i, r) in self.right_e[..len].iter_mut().enumerate() {
            if self.spec.is_frozen(i) {
                *r = 1;
            }
        }

        // A known value wins over an erasure; two known values agree.
        #[inline]
        fn join(x: i8, y: i8) -> i8 {
            if x != 0 {
                x
            } else {
                y
            }
        }

        let mut iterations = 0;
        while iterations < max_iter {
            iterations += 1;
            let mut changed = false;
            for s in (0..n).rev() {
                let half = order.half(n, s);
                let (l_lo, l_hi) = self.left_e.split_at_mut((s + 1) * len);
                let l_s = &mut l_lo[s * len..];
                let l_s1 = &l_hi[..len];
                let r_s = &self.right_e[s * len..(s + 1) * len];
                for start in (0..len).step_by(2 * half) {
                    for a in start..start + half {
                        let b = a + half;
                        let la = l_s1[a] * join(l_s1[b], r_s[b]);
                        let lb = join(r_s[a] * l_s1[a], l_s1[b]);
                        changed |= la != l_s[a] || lb != l_s[b];
                        l_s[a] = la;
                        l_s[b] = lb;
                    }
                }
            }
            for s in 0..n {
                let half = order.half(n, s);
                let (r_lo, r_hi) = self.right_e.split_at_mut((s + 1) * len);
                let r_s = &r_lo[s * len..];
                let r_s1 = &mut r_hi[..len];
                let l_s1 = &self.left_e[(s + 1) * len..(s + 2) * len];
                for start in (0..len).step_by(2 * half) {
                    for a in start..start + half {
                        let b = a + half;
                        let ra = r_s[a] * join(l_s1[b], r_s[b]);
                        let rb = join(r_s[a] * l_s1[a], r_s[b]);
                        changed |= ra != r_s1[a] || rb != r_s1[b];
                        r_s1[a] = ra;
                        r_s1[b] = rb;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut unresolved: Vec<usize> = (0..(n + 1) * len)
            .filter(|&v| self.left_e[v] == 0 && self.right_e[v] == 0)
            .map(|v| order.graph_var(n, v))
            .collect();
        unresolved.sort_unstable();
        let info_estimate: Vec<Option<u8>> = self
            .spec
            .info_set()
            .iter()
            .map(|&i| match join(self.left_e[i], self.right_e[i]) {
                1 => Some(0),
                -1 => Some(1),
                _ => None,
            })
            .collect();
        Ok(DecodeResult {
            converged: info_estimate.iter().all(Option::is_some),
            info_estimate,
            iterations_used: iterations,
            unresolved,
        })
    }
}
