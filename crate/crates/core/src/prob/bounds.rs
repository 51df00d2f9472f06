//! Explicit instantiations of the concentration and continuity constants.
//!
//! The coding arguments only assert that constants `c'`, `f1(δ)`, `f2(δ)`
//! with the right limits exist. The functions here are concrete valid
//! bounds derived from Hoeffding's inequality and first-order expansions of
//! `log` probabilities; they instantiate those constants but are not claimed
//! to equal any particular choice of them.

use super::{Channel, Distribution, TypicalityParams};
use crate::error::{Error, Result};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Upper bound on `P^n(x^n ∉ T^n_{X,δ})` for i.i.d. `x^n`.
///
/// Per-letter Hoeffding (`2 exp(-2 n δ²)`) plus a union bound over the
/// alphabet: `min(1, 2|A| 2^{-2 n δ² log2 e})`. Returns 1 at `n = 0`.
pub fn typicality_tail_bound(params: &TypicalityParams, alphabet: usize) -> f64 {
    if params.n == 0 {
        return 1.0;
    }
    let n = params.n as f64;
    let exponent = -2.0 * n * params.delta * params.delta * LOG2_E;
    (2.0 * alphabet as f64 * exponent.exp2()).min(1.0)
}

/// `(n+1)^{|S|}`, the classical bound on the number of types.
pub fn type_count_bound(n: usize, alphabet: usize) -> Result<u128> {
    let base = n as u128 + 1;
    base.checked_pow(alphabet as u32)
        .ok_or_else(|| Error::OutOfRange(format!("({n}+1)^{alphabet} overflows u128")))
}

/// Exact number of types of length-`n` sequences: `C(n + |S| - 1, |S| - 1)`.
pub fn exact_type_count(n: usize, alphabet: usize) -> Result<u128> {
    if alphabet == 0 {
        return Ok(if n == 0 { 1 } else { 0 });
    }
    let k = (alphabet - 1) as u128;
    let top = n as u128 + k;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(top - i)
            .ok_or_else(|| Error::OutOfRange("type count overflows u128".into()))?
            / (i + 1);
    }
    Ok(acc)
}

/// Multiplicative Chernoff bound for the mean of `L` i.i.d. variables in
/// `[0, b]` with expectation `nu`: the probability of leaving
/// `[(1-ε)ν, (1+ε)ν]` is at most `2 exp(-L ε² ν / (3b))`.
///
/// Evaluated as `2 · 2^{-L ε² ν log2(e) / (3b)}` and clamped to 1.
pub fn chernoff_bound(l: usize, nu: f64, b: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::OutOfRange(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if !(nu > 0.0 && nu <= b) {
        return Err(Error::OutOfRange(format!("need 0 < nu <= b, got nu = {nu}, b = {b}")));
    }
    if l == 0 {
        return Err(Error::OutOfRange("need L >= 1".into()));
    }
    let exponent = -(l as f64) * eps * eps * nu * LOG2_E / (3.0 * b);
    Ok((2.0 * exponent.exp2()).min(1.0))
}

/// `f1(δ)` with `|T^n_{Y,δ}| <= 2^{n (H(Y) + f1(δ))}`:
/// `δ Σ_{b ∈ supp P} (-log P(b))`.
pub fn f1_bound(p: &Distribution, delta: f64) -> f64 {
    delta * p.probs().iter().filter(|v| **v > 0.0).map(|v| -v.log2()).sum::<f64>()
}

/// `f2(δ)` with `W^n(y^n|x^n) <= 2^{-n (H(Y|X) - f2(δ))}` for `x^n` δ-typical
/// and `y^n ∈ T^n_{Y|X,δ}(x^n)`: `δ Σ_{W(b|a) > 0} (1 + W(b|a)) (-log W(b|a))`.
pub fn f2_bound(ch: &Channel, delta: f64) -> f64 {
    delta
        * ch.as_flat()
            .iter()
            .filter(|w| **w > 0.0)
            .map(|w| (1.0 + w) * (-w.log2()))
            .sum::<f64>()
}

/// Uniform continuity of entropy in total variation on an alphabet of size
/// `m`: `|H(P) - H(Q)| <= -θ log(θ/m)` when `θ = ||P - Q|| <= 1/2`.
/// Returns `None` outside that range.
pub fn mi_continuity_modulus(theta: f64, alphabet: f64) -> Option<f64> {
    if !(0.0..=0.5).contains(&theta) {
        return None;
    }
    if theta == 0.0 {
        return Some(0.0);
    }
    Some(-theta * (theta / alphabet).log2())
}
