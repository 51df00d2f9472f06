use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::code::{decode_table, error_under, Code};
use crate::error::{Error, Result};
use crate::prob::{type_count_bound, Channel};
use crate::seq;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RtReport {
    pub n: usize,
    pub states: usize,
    pub eps: f64,
    /// `min_q Σ_{s^n} f(s^n) Π q(s_i)` over types `q`.
    pub hypothesis_min: f64,
    pub hypothesis_holds: bool,
    /// `1 - 3 (n+1)^{|S|} ε`.
    pub bound: f64,
    /// Type counts with the average of `f` over the type class.
    pub type_averages: Vec<(Vec<usize>, f64)>,
    pub conclusion_min: f64,
    /// `None` when the hypothesis fails.
    pub conclusion_holds: Option<bool>,
}

/// Checks the robustification inequality for `f` given as a table over
/// `S^n` in [`seq::index`] order. With `eps = None` the smallest `ε` for
/// which the hypothesis holds is used.
pub fn rt_check(f: &[f64], n: usize, states: usize, eps: Option<f64>) -> Result<RtReport> {
    let total = seq::count(states, n)?;
    if f.len() != total {
        return Err(Error::DimensionMismatch(format!("table has {} entries, |S|^n = {total}", f.len())));
    }
    if let Some(v) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::OutOfRange(format!("f takes value {v} outside [0, 1]")));
    }
    let types = seq::compositions(n, states);
    let seqs: Vec<Vec<usize>> = seq::all(states, n)?.collect();
    let mut hypothesis_min = f64::INFINITY;
    for t in &types {
        let q: Vec<f64> = t.iter().map(|c| *c as f64 / n as f64).collect();
        let v: f64 = seqs.iter().zip(f).map(|(s, fv)| fv * s.iter().map(|&x| q[x]).product::<f64>()).sum();
        hypothesis_min = hypothesis_min.min(v);
    }
    let eps = match eps {
        Some(e) if e >= 0.0 => e,
        Some(e) => return Err(Error::OutOfRange(format!("eps must be non-negative, got {e}"))),
        None => (1.0 - hypothesis_min).max(0.0),
    };
    let hypothesis_holds = hypothesis_min >= 1.0 - eps - 1e-12;
    let bound = 1.0 - 3.0 * type_count_bound(n, states)? as f64 * eps;
    let type_averages: Vec<(Vec<usize>, f64)> = types
        .iter()
        .map(|t| {
            let class = seq::type_class(t);
            let avg = class.iter().map(|s| f[seq::index(s, states)]).sum::<f64>() / class.len() as f64;
            (t.clone(), avg)
        })
        .collect();
    let conclusion_min = type_averages.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    Ok(RtReport {
        n,
        states,
        eps,
        hypothesis_min,
        hypothesis_holds,
        bound,
        type_averages,
        conclusion_min,
        conclusion_holds: hypothesis_holds.then_some(conclusion_min >= bound - 1e-12),
    })
}

/// `f(s^n) = 1 - P[M ≠ M̂]` under the state sequence `s^n` of `family`.
pub fn success_table<C: Code + ?Sized>(code: &C, family: &[Channel], budget: &Budget) -> Result<Vec<f64>> {
    let n = code.n();
    let outputs = family.first().ok_or_else(|| Error::InvalidChannel("empty family".into()))?.outputs();
    let table = decode_table(code, outputs, budget)?;
    let count = seq::count(family.len(), n)?;
    budget.check("success table over S^n", (count * code.messages() * code.randomness()) as f64 * table.len() as f64)?;
    Ok(seq::all(family.len(), n)?.map(|s| 1.0 - error_under(code, &table, family, &s).0).collect())
}
