use super::{boxplus, DecodeResult};
use crate::channels::ChannelOutput;
use crate::error::{Error, Result};
use crate::polar::CodeSpec;

/// Partial-sum value of an erased bit.
const ERASED: u8 = 2;

#[inline]
fn xor3(a: u8, b: u8) -> u8 {
    if a == ERASED || b == ERASED {
        ERASED
    } else {
        a ^ b
    }
}

/// Successive-cancellation decoding.
///
/// Erasure outputs are decoded with three-valued semantics (`±∞` for a
/// known bit, `0` for an erasure); an undecided information bit stays
/// erased and erases every partial sum it enters. Frozen bits decode to 0.
pub fn sc_decode(spec: &CodeSpec, y: &ChannelOutput) -> Result<DecodeResult> {
    if y.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            actual: y.len(),
        });
    }
    let (llr, erasure) = match y {
        ChannelOutput::Erasure { symbols, .. } => (
            symbols
                .iter()
                .map(|s| match s {
                    Some(0) => f64::INFINITY,
                    Some(_) => f64::NEG_INFINITY,
                    None => 0.0,
                })
                .collect::<Vec<_>>(),
            true,
        ),
        ChannelOutput::Llr { llr, .. } => (llr.clone(), false),
    };
    let mut u = vec![None; spec.len()];
    sc_node(&llr, spec.frozen_mask(), erasure, &mut u);
    Ok(DecodeResult {
        info_estimate: spec.gather(&u),
        iterations_used: 1,
        converged: u.iter().all(Option::is_some),
        unresolved: Vec::new(),
    })
}

/// Decodes the inputs under one subtree; returns its re-encoded codeword.
fn sc_node(llr: &[f64], frozen: &[bool], erasure: bool, u: &mut [Option<u8>]) -> Vec<u8> {
    let len = llr.len();
    if len == 1 {
        let bit = if frozen[0] {
            Some(0)
        } else if llr[0] < 0.0 {
            Some(1)
        } else if llr[0] > 0.0 || !erasure {
            Some(0)
        } else {
            None
        };
        u[0] = bit;
        return vec![bit.unwrap_or(ERASED)];
    }
    let half = len / 2;
    let (ya, yb) = llr.split_at(half);
    let (fa, fb) = frozen.split_at(half);
    let (ua, ub) = u.split_at_mut(half);

    let upper: Vec<f64> = ya.iter().zip(yb).map(|(&a, &b)| boxplus(a, b)).collect();
    let ca = sc_node(&upper, fa, erasure, ua);

    let lower: Vec<f64> = ya
        .iter()
        .zip(yb)
        .zip(&ca)
        .map(|((&a, &b), &c)| {
            if c == ERASED || b.is_infinite() {
                return b;
            }
            let v = if c == 0 { a } else { -a };
            if v.is_infinite() {
                v
            } else {
                b + v
            }
        })
        .collect();
    let cb = sc_node(&lower, fb, erasure, ub);

    let mut out: Vec<u8> = ca.iter().zip(&cb).map(|(&a, &b)| xor3(a, b)).collect();
    out.extend_from_slice(&cb);
    out
}
