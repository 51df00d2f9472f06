//! Permuted codes, correlated codes from permutation averaging, and numeric
//! checks of the robustification step.

mod manifest;
mod rt;

pub use manifest::CorrelatedManifest;
pub use rt::{rt_check, success_table, RtReport};

use std::borrow::Cow;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::code::{decode_table, error_under, leakage, message_output_laws, Code, WiretapCode};
use crate::error::{Error, Result};
use crate::prob::{Channel, Distribution};
use crate::seq;

/// A bijection of `{0, .., n-1}` acting on sequences by `π(x)[i] = x[π[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &i in &map {
            if i >= map.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::OutOfRange(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.map.iter().map(|&i| x[i]).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Self { map: inv }
    }

    /// `self.compose(other).apply(x) == self.apply(&other.apply(x))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self { map: self.map.iter().map(|&i| other.map[i]).collect() }
    }

    /// The whole symmetric group in lexicographic order, identity first.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        if n > 8 {
            return Err(Error::Budget {
                what: format!("enumerating all permutations of {n} letters"),
                ops: (1..=n).map(|i| i as f64).product(),
                budget: 40320.0,
            });
        }
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self { map: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        Ok(out)
    }
}

/// The code with words `π(x_{jl})` and decoder `y ↦ decode(π⁻¹(y))`.
#[derive(Clone, Debug)]
pub struct PermutedCode<'a, C: Code + ?Sized> {
    base: &'a C,
    pi: Permutation,
    inv: Permutation,
}

pub fn permute_code<'a, C: Code + ?Sized>(code: &'a C, pi: &Permutation) -> Result<PermutedCode<'a, C>> {
    if pi.len() != code.n() {
        return Err(Error::DimensionMismatch(format!("permutation of {} letters for blocklength {}", pi.len(), code.n())));
    }
    Ok(PermutedCode { base: code, pi: pi.clone(), inv: pi.inverse() })
}

impl<C: Code + ?Sized> Code for PermutedCode<'_, C> {
    fn n(&self) -> usize {
        self.base.n()
    }

    fn messages(&self) -> usize {
        self.base.messages()
    }

    fn randomness(&self) -> usize {
        self.base.randomness()
    }

    fn word(&self, j: usize, l: usize) -> Cow<'_, [usize]> {
        Cow::Owned(self.pi.apply(&self.base.word(j, l)))
    }

    fn decode(&self, y: &[usize]) -> (usize, usize) {
        self.base.decode(&self.inv.apply(y))
    }
}

/// A finitely supported mixture of permuted copies of one base code.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatedCode {
    pub base: WiretapCode,
    pub perms: Vec<Permutation>,
    pub weights: Distribution,
    pub support_cap: Option<usize>,
}

impl CorrelatedCode {
    pub fn new(base: WiretapCode, perms: Vec<Permutation>, weights: Distribution, support_cap: Option<usize>) -> Result<Self> {
        if perms.is_empty() || perms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!("{} permutations, {} weights", perms.len(), weights.len())));
        }
        if let Some(cap) = support_cap {
            if perms.len() > cap {
                return Err(Error::OutOfRange(format!("{} members exceed the support cap {cap}", perms.len())));
            }
        }
        if let Some(p) = perms.iter().find(|p| p.len() != base.n()) {
            return Err(Error::DimensionMismatch(format!("permutation {:?} does not match n={}", p.as_slice(), base.n())));
        }
        Ok(Self { base, perms, weights, support_cap })
    }

    pub fn members(&self) -> impl Iterator<Item = (f64, PermutedCode<'_, WiretapCode>)> + '_ {
        self.weights
            .probs()
            .iter()
            .zip(&self.perms)
            .map(move |(w, p)| (*w, permute_code(&self.base, p).expect("lengths checked")))
    }
}

/// Uniform mixture over `m` permutations. With `full`, the whole group is
/// enumerated instead (`n ≤ 8`); otherwise the identity is member 0 and the
/// remaining `m - 1` are drawn uniformly.
pub fn robustify<R: Rng + ?Sized>(code: &WiretapCode, m: usize, full: bool, rng: &mut R) -> Result<CorrelatedCode> {
    let n = code.n();
    let perms = if full {
        Permutation::all(n)?
    } else {
        if m == 0 {
            return Err(Error::OutOfRange("need at least one permutation".into()));
        }
        std::iter::once(Permutation::identity(n)).chain((1..m).map(|_| Permutation::random(n, rng))).collect()
    };
    let w = Distribution::uniform(perms.len());
    CorrelatedCode::new(code.clone(), perms, w, None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedError {
    pub value: f64,
    pub worst: usize,
    pub per_state: Vec<f64>,
}

/// `max_{s^n} Σ_γ w_γ P[M ≠ M̂_{s^n}(γ)]` over `states`.
pub fn correlated_error(cc: &CorrelatedCode, family: &[Channel], states: &[Vec<usize>], budget: &Budget) -> Result<CorrelatedError> {
    let n = cc.base.n();
    let outputs = family.first().ok_or_else(|| Error::InvalidChannel("empty family".into()))?.outputs();
    if let Some(s) = states.iter().find(|s| s.len() != n || s.iter().any(|&x| x >= family.len())) {
        return Err(Error::DimensionMismatch(format!("bad state sequence {s:?}")));
    }
    let bn = seq::count(outputs, n)?;
    budget.check(
        "correlated error",
        (cc.perms.len() * states.len().max(1) * cc.base.messages() * cc.base.randomness()) as f64 * bn as f64,
    )?;
    let mut per_state = vec![0.0; states.len()];
    for (w, member) in cc.members() {
        let table = decode_table(&member, outputs, budget)?;
        for (acc, s) in per_state.iter_mut().zip(states) {
            *acc += w * error_under(&member, &table, family, s).0;
        }
    }
    let worst = per_state.iter().enumerate().fold(0, |b, (i, v)| if *v > per_state[b] { i } else { b });
    Ok(CorrelatedError { value: per_state.get(worst).copied().unwrap_or(0.0), worst, per_state })
}

/// `(Σ_γ w_γ I(M;Z_{s^n}(γ)), max_γ I(M;Z_{s^n}(γ)))`.
pub fn correlated_leakage(cc: &CorrelatedCode, family: &[Channel], s: &[usize], budget: &Budget) -> Result<(f64, f64)> {
    let mut mean = 0.0;
    let mut max = 0.0f64;
    for (w, member) in cc.members() {
        let v = leakage(&member, family, s, budget)?;
        mean += w * v;
        max = max.max(v);
    }
    Ok((mean, max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermIdentity {
    pub max_abs_diff: f64,
    pub holds: bool,
}

/// Compares `P_{M, π(Z_{s^n}(id))}` with `P_{M, Z_{π(s^n)}(π)}` entrywise.
pub fn perm_identity_check<C: Code + ?Sized>(
    code: &C,
    family: &[Channel],
    s: &[usize],
    pi: &Permutation,
    budget: &Budget,
) -> Result<PermIdentity> {
    let permuted = permute_code(code, pi)?;
    let c = family.first().ok_or_else(|| Error::InvalidChannel("empty family".into()))?.outputs();
    let n = code.n();
    let cn = seq::count(c, n)?;
    budget.check("permutation identity tables", 2.0 * (code.messages() * code.randomness()) as f64 * cn as f64)?;
    let inv = pi.inverse();
    let lhs = message_output_laws(code, family, s);
    let rhs = message_output_laws(&permuted, family, &pi.apply(s));
    let mut diff = 0.0f64;
    for (lj, rj) in lhs.iter().zip(&rhs) {
        for (z, r) in rj.iter().enumerate() {
            let zs = seq::decode(z, c, n);
            let l = lj[seq::index(&inv.apply(&zs), c)];
            diff = diff.max((l - r).abs() / code.messages() as f64);
        }
    }
    Ok(PermIdentity { max_abs_diff: diff, holds: diff <= 1e-12 })
}

/// `(max_{π,s} I(M;Z_s(π)), max_s I(M;Z_s(id)))` over the given sets.
pub fn perm_leakage_maxima<C: Code + ?Sized>(
    code: &C,
    family: &[Channel],
    states: &[Vec<usize>],
    perms: &[Permutation],
    budget: &Budget,
) -> Result<(f64, f64)> {
    let mut over_perms = 0.0f64;
    let mut base = 0.0f64;
    for s in states {
        base = base.max(leakage(code, family, s, budget)?);
        for p in perms {
            over_perms = over_perms.max(leakage(&permute_code(code, p)?, family, s, budget)?);
        }
    }
    Ok((over_perms, base))
}
