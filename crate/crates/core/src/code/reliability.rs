use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Code;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::prob::Channel;
use crate::seq;

/// `W^n_{s^n}(·|x^n)` over all output sequences, first letter most significant.
pub(crate) fn sequence_law(x: &[usize], family: &[Channel], s: &[usize], outputs: usize) -> Vec<f64> {
    let mut law = vec![1.0];
    for (&xi, &si) in x.iter().zip(s) {
        let row = family[si].row(xi);
        let mut next = vec![0.0; law.len() * outputs];
        for (i, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (o, w) in next[i * outputs..(i + 1) * outputs].iter_mut().zip(row) {
                *o = p * w;
            }
        }
        law = next;
    }
    law
}

pub(crate) fn check_states(family: &[Channel], states: &[Vec<usize>], n: usize) -> Result<()> {
    if family.is_empty() {
        return Err(Error::InvalidChannel("empty channel family".into()));
    }
    for s in states {
        if s.len() != n || s.iter().any(|&x| x >= family.len()) {
            return Err(Error::DimensionMismatch(format!("state sequence {s:?} is not length {n} over {} states", family.len())));
        }
    }
    Ok(())
}

/// Decoder output for every `y^n`, in [`seq::index`] order.
pub fn decode_table<C: Code + ?Sized>(code: &C, outputs: usize, budget: &Budget) -> Result<Vec<(usize, usize)>> {
    let n = code.n();
    let count = seq::count(outputs, n)?;
    budget.check(
        "decoder table over B^n",
        count as f64 * (code.messages() * code.randomness() * n.max(1)) as f64,
    )?;
    Ok((0..count).into_par_iter().map(|i| code.decode(&seq::decode(i, outputs, n))).collect())
}

/// `(message error, (j,l) error)` of one state sequence, averaged over `(j, l)`.
pub fn error_under<C: Code + ?Sized>(
    code: &C,
    table: &[(usize, usize)],
    family: &[Channel],
    s: &[usize],
) -> (f64, f64) {
    let outputs = family[0].outputs();
    let (jn, ln) = (code.messages(), code.randomness());
    let mut msg = 0.0;
    let mut full = 0.0;
    for j in 0..jn {
        for l in 0..ln {
            let law = sequence_law(&code.word(j, l), family, s, outputs);
            for (p, &(dj, dl)) in law.iter().zip(table) {
                if dj != j {
                    msg += p;
                    full += p;
                } else if dl != l {
                    full += p;
                }
            }
        }
    }
    let w = (jn * ln) as f64;
    (msg / w, full / w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Worst case over the given states.
    pub message_error: f64,
    pub full_error: f64,
    /// Index of the state attaining `message_error`.
    pub worst: usize,
    pub per_state: Vec<(f64, f64)>,
}

/// Constant sequences `(r, r, ..., r)`, one per compound member.
pub fn compound_states(count: usize, n: usize) -> Vec<Vec<usize>> {
    (0..count).map(|r| vec![r; n]).collect()
}

/// Exact average error, maximised over `states` (sequences over `family`).
/// Pass [`compound_states`] to evaluate a compound list.
pub fn average_error<C: Code + ?Sized>(
    code: &C,
    family: &[Channel],
    states: &[Vec<usize>],
    budget: &Budget,
) -> Result<ErrorReport> {
    check_states(family, states, code.n())?;
    let outputs = family[0].outputs();
    let table = decode_table(code, outputs, budget)?;
    budget.check(
        "exact error evaluation",
        (states.len() * code.messages() * code.randomness()) as f64 * table.len() as f64,
    )?;
    let per_state: Vec<(f64, f64)> = states.par_iter().map(|s| error_under(code, &table, family, s)).collect();
    let worst = per_state.iter().enumerate().fold(0, |b, (i, e)| if e.0 > per_state[b].0 { i } else { b });
    Ok(ErrorReport { message_error: per_state[worst].0, full_error: per_state[worst].1, worst, per_state })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McError {
    pub message_error: f64,
    pub full_error: f64,
    pub message_sigma: f64,
    pub full_sigma: f64,
    pub trials: usize,
}

/// Monte-Carlo error under one state sequence: uniform `(j, l)`, sampled channel output.
pub fn error_monte_carlo<C: Code + ?Sized, R: Rng + ?Sized>(
    code: &C,
    family: &[Channel],
    s: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<McError> {
    check_states(family, std::slice::from_ref(&s.to_vec()), code.n())?;
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    let mut msg = 0usize;
    let mut full = 0usize;
    let mut y = vec![0; code.n()];
    for _ in 0..trials {
        let j = rng.random_range(0..code.messages());
        let l = rng.random_range(0..code.randomness());
        let x = code.word(j, l);
        for i in 0..y.len() {
            let row = family[s[i]].row(x[i]);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            y[i] = row.len() - 1;
            for (b, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    y[i] = b;
                    break;
                }
            }
        }
        let (dj, dl) = code.decode(&y);
        if dj != j {
            msg += 1;
            full += 1;
        } else if dl != l {
            full += 1;
        }
    }
    let t = trials as f64;
    let (pm, pf) = (msg as f64 / t, full as f64 / t);
    Ok(McError {
        message_error: pm,
        full_error: pf,
        message_sigma: (pm * (1.0 - pm) / t).sqrt(),
        full_sigma: (pf * (1.0 - pf) / t).sqrt(),
        trials,
    })
}
