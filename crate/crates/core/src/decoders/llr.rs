use serde::{Deserialize, Serialize};

/// `ln(1 + e^{-x})` for `x ≥ 0`.
#[inline]
fn softplus_neg(x: f64) -> f64 {
    (-x).exp().ln_1p()
}

/// Check-node combination of two LLRs, `2·atanh(tanh(a/2)·tanh(b/2))`.
///
/// Evaluated in the Jacobian form
/// `sign(a)sign(b)min(|a|,|b|) + ln(1+e^{−|a+b|}) − ln(1+e^{−|a−b|})`,
/// which stays accurate for large magnitudes. An infinite argument acts as a
/// known bit: `boxplus(±∞, b) = ±b`.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return if a > 0.0 { b } else { -b };
    }
    if b.is_infinite() {
        return if b > 0.0 { a } else { -a };
    }
    let (aa, ab) = (a.abs(), b.abs());
    let m = aa.min(ab);
    let signed = if (a < 0.0) != (b < 0.0) { -m } else { m };
    signed + softplus_neg((a + b).abs()) - softplus_neg((a - b).abs())
}

/// Exact message arithmetic on `sign(L)·e^{−|L|}`.
///
/// Check nodes map magnitudes `p, q` to `(p + q)/(1 + pq)`; variable nodes
/// multiply them when the signs agree and divide the smaller by the larger
/// otherwise. No transcendental function is evaluated per update.
pub(crate) mod expo {
    /// Smallest magnitude, an LLR of 700. It stands in for certainty and
    /// keeps every operation free of `0/0`.
    pub const FLOOR: f64 = 9.85967654375977e-305;

    const SIGN_BIT: u64 = 1 << 63;

    #[inline]
    pub fn from_llr(llr: f64) -> f64 {
        (-llr.abs()).exp().max(FLOOR).copysign(llr)
    }

    #[inline]
    pub fn to_llr(x: f64) -> f64 {
        let m = -x.abs().ln();
        if x.is_sign_negative() {
            -m
        } else {
            m
        }
    }

    #[inline]
    pub fn check(a: f64, b: f64) -> f64 {
        let (p, q) = (a.abs(), b.abs());
        let sign = (a.to_bits() ^ b.to_bits()) & SIGN_BIT;
        f64::from_bits(((p + q) / (1.0 + p * q)).to_bits() | sign)
    }

    #[inline]
    pub fn var(a: f64, b: f64) -> f64 {
        let (p, q) = (a.abs(), b.abs());
        let agree = (a.to_bits() ^ b.to_bits()) & SIGN_BIT == 0;
        let (lo, hi, strong) = if p < q { (p, q, a) } else { (q, p, b) };
        let mag = if agree { (p * q).max(FLOOR) } else { lo / hi };
        f64::from_bits(mag.to_bits() | (strong.to_bits() & SIGN_BIT))
    }

    /// Hard decision is 1; `L = 0` decides 0.
    #[inline]
    pub fn is_one(x: f64) -> bool {
        x.is_sign_negative() && x != -1.0
    }
}

/// Uniform mid-tread LLR quantizer: clamp to `[−clamp, clamp]` and round to
/// `2^bits − 1` levels spaced `clamp / (2^(bits−1) − 1)` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantizer {
    pub clamp: f64,
    pub bits: u32,
}

impl Default for Quantizer {
    fn default() -> Self {
        Quantizer {
            clamp: 20.0,
            bits: 9,
        }
    }
}

impl Quantizer {
    /// Largest level index; levels are `k·step` for `|k| ≤ max_level`.
    pub fn max_level(&self) -> i64 {
        (1i64 << (self.bits - 1)) - 1
    }

    pub fn step(&self) -> f64 {
        self.clamp / self.max_level() as f64
    }

    #[inline]
    pub fn quantize(&self, x: f64) -> f64 {
        let step = self.step();
        let top = self.max_level() as f64;
        (x / step).round().clamp(-top, top) * step
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn boxplus_tanh(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn boxplus_special_values() {
        assert_eq!(boxplus(f64::INFINITY, 3.5), 3.5);
        assert_eq!(boxplus(-3.5, f64::INFINITY), -3.5);
        assert_eq!(boxplus(f64::NEG_INFINITY, 2.0), -2.0);
        assert_eq!(boxplus(f64::INFINITY, f64::INFINITY), f64::INFINITY);
        assert_eq!(boxplus(0.0, 7.0), 0.0);
        // Saturated inputs behave like min-sum.
        assert!((boxplus(800.0, -900.0) + 800.0).abs() < 1e-9);
    }

    #[test]
    fn quantizer_grid() {
        let q = Quantizer::default();
        assert_eq!(q.max_level(), 255);
        assert_eq!(q.quantize(1e9), 20.0);
        assert_eq!(q.quantize(f64::NEG_INFINITY), -20.0);
        assert_eq!(q.quantize(0.0), 0.0);
        assert!((q.quantize(0.05) - 20.0 / 255.0).abs() < 1e-12);
        // 511 distinct levels fit into 9 bits.
        let levels: std::collections::BTreeSet<i64> = (-3000..=3000)
            .map(|k| (q.quantize(k as f64 / 100.0) / q.step()).round() as i64)
            .collect();
        assert_eq!(levels.len(), 511);
    }

    proptest! {
        #[test]
        fn boxplus_matches_tanh_rule(a in -15.0f64..15.0, b in -15.0f64..15.0) {
            let exact = boxplus_tanh(a, b);
            prop_assert!((boxplus(a, b) - exact).abs() < 1e-9 * (1.0 + exact.abs()));
        }

        #[test]
        fn boxplus_is_symmetric_and_bounded(a in -60.0f64..60.0, b in -60.0f64..60.0) {
            let v = boxplus(a, b);
            prop_assert!((v - boxplus(b, a)).abs() < 1e-12);
            prop_assert!(v.abs() <= a.abs().min(b.abs()) + 1e-12);
            prop_assert!((boxplus(-a, b) + v).abs() < 1e-12);
        }

        #[test]
        fn quantizer_error_is_half_step(x in -20.0f64..20.0) {
            let q = Quantizer::default();
            prop_assert!((q.quantize(x) - x).abs() <= q.step() / 2.0 + 1e-12);
        }
    }
}
