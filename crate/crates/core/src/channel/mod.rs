//! AVWC and CAVWC specifications and their structural algebra.

mod degraded;
mod file;
mod metric;

pub use degraded::{
    best_eavesdropper_check, degraded_check, strongly_degraded_check, DegradednessCertificate,
    StrongDegradedness, DEGRADED_TOL,
};
pub use file::{Alphabet, SpecDocument, SpecFile, StateEntry};
pub use metric::{hausdorff_distance, operator_norm_distance};

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::prob::{Channel, Distribution};
use crate::seq;

/// An arbitrarily varying wiretap channel: per state `s`, a legitimate
/// channel `W_s: A -> P(B)` and an eavesdropper channel `V_s: A -> P(C)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvwcSpec {
    legit: Vec<Channel>,
    eaves: Vec<Channel>,
}

/// Compound legitimate part (state fixed over the block) with an
/// arbitrarily varying eavesdropper part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavwcSpec {
    compound: Vec<Channel>,
    eaves: Vec<Channel>,
}

fn check_family(family: &[Channel], what: &str) -> Result<(usize, usize)> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidChannel(format!("{what} family is empty")))?;
    let dims = (first.inputs(), first.outputs());
    if let Some((i, c)) =
        family.iter().enumerate().find(|(_, c)| (c.inputs(), c.outputs()) != dims)
    {
        return Err(Error::DimensionMismatch(format!(
            "{what} state {i} is {}x{}, state 0 is {}x{}",
            c.inputs(),
            c.outputs(),
            dims.0,
            dims.1
        )));
    }
    Ok(dims)
}

fn check_pair(legit: &[Channel], eaves: &[Channel]) -> Result<()> {
    let (a1, _) = check_family(legit, "legitimate")?;
    let (a2, _) = check_family(eaves, "eavesdropper")?;
    if a1 != a2 {
        return Err(Error::DimensionMismatch(format!(
            "legitimate input alphabet {a1} differs from eavesdropper input alphabet {a2}"
        )));
    }
    Ok(())
}

impl AvwcSpec {
    pub fn new(legit: Vec<Channel>, eaves: Vec<Channel>) -> Result<Self> {
        check_pair(&legit, &eaves)?;
        if legit.len() != eaves.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} legitimate states but {} eavesdropper states",
                legit.len(),
                eaves.len()
            )));
        }
        Ok(Self { legit, eaves })
    }

    /// Single-state AVWC, i.e. an ordinary wiretap channel.
    pub fn single(w: Channel, v: Channel) -> Result<Self> {
        Self::new(vec![w], vec![v])
    }

    pub fn states(&self) -> usize {
        self.legit.len()
    }

    pub fn input_size(&self) -> usize {
        self.legit[0].inputs()
    }

    pub fn legit_output_size(&self) -> usize {
        self.legit[0].outputs()
    }

    pub fn eaves_output_size(&self) -> usize {
        self.eaves[0].outputs()
    }

    pub fn legit(&self) -> &[Channel] {
        &self.legit
    }

    pub fn eaves(&self) -> &[Channel] {
        &self.eaves
    }

    /// Appends a copy of state `s`; the Hausdorff distance to the original is 0.
    pub fn with_duplicated_state(&self, s: usize) -> Self {
        let mut out = self.clone();
        out.legit.push(self.legit[s].clone());
        out.eaves.push(self.eaves[s].clone());
        out
    }

    /// The CAVWC whose compound part is the legitimate family itself.
    pub fn as_cavwc(&self) -> CavwcSpec {
        CavwcSpec { compound: self.legit.clone(), eaves: self.eaves.clone() }
    }
}

impl CavwcSpec {
    pub fn new(compound: Vec<Channel>, eaves: Vec<Channel>) -> Result<Self> {
        check_pair(&compound, &eaves)?;
        Ok(Self { compound, eaves })
    }

    pub fn compound(&self) -> &[Channel] {
        &self.compound
    }

    pub fn eaves(&self) -> &[Channel] {
        &self.eaves
    }

    pub fn input_size(&self) -> usize {
        self.compound[0].inputs()
    }

    pub fn legit_output_size(&self) -> usize {
        self.compound[0].outputs()
    }

    pub fn eaves_output_size(&self) -> usize {
        self.eaves[0].outputs()
    }

    pub fn eaves_states(&self) -> usize {
        self.eaves.len()
    }
}

/// `W_q(b|a) = Σ_s q(s) W_s(b|a)`.
pub fn mix_channel(family: &[Channel], q: &Distribution) -> Result<Channel> {
    let (inputs, outputs) = check_family(family, "mixed")?;
    if q.len() != family.len() {
        return Err(Error::DimensionMismatch(format!(
            "mixing law on {} states, family has {}",
            q.len(),
            family.len()
        )));
    }
    Ok(mix_unchecked(family, q.probs(), inputs, outputs))
}

pub(crate) fn mix_unchecked(family: &[Channel], q: &[f64], inputs: usize, outputs: usize) -> Channel {
    let mut data = vec![0.0; inputs * outputs];
    for (w, &qs) in family.iter().zip(q) {
        if qs == 0.0 {
            continue;
        }
        for (acc, v) in data.iter_mut().zip(w.as_flat()) {
            *acc += qs * v;
        }
    }
    Channel::from_flat_unchecked(inputs, outputs, data)
}

/// `W^n_{s^n}(y^n|x^n) = Π_i W_{s_i}(y_i|x_i)`.
pub fn sequence_transition(family: &[Channel], x: &[usize], y: &[usize], s: &[usize]) -> Result<f64> {
    if x.len() != y.len() || x.len() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "lengths x={}, y={}, s={}",
            x.len(),
            y.len(),
            s.len()
        )));
    }
    if s.iter().any(|&si| si >= family.len()) {
        return Err(Error::DimensionMismatch("state index outside family".into()));
    }
    Ok(x.iter().zip(y).zip(s).map(|((&a, &b), &si)| family[si].get(a, b)).product())
}

/// The `k`-letter channel `W^k_{s^k}` as a matrix on `A^k -> B^k`.
pub fn product_channel(family: &[Channel], states: &[usize]) -> Result<Channel> {
    let mut out = Channel::from_flat_unchecked(1, 1, vec![1.0]);
    for &s in states {
        let w = family
            .get(s)
            .ok_or_else(|| Error::DimensionMismatch(format!("state {s} outside family")))?;
        out = out.tensor(w)?;
    }
    Ok(out)
}

fn prefix_family(family: &[Channel], k: usize, states: &[Vec<usize>], t: &Channel) -> Result<Vec<Channel>> {
    states
        .iter()
        .map(|s| {
            debug_assert_eq!(s.len(), k);
            t.then(&product_channel(family, s)?)
        })
        .collect()
}

fn check_prefix(inputs: usize, k: usize, t: &Channel) -> Result<()> {
    let ak = seq::count(inputs, k)?;
    if t.outputs() != ak {
        return Err(Error::DimensionMismatch(format!(
            "prefix channel has {} outputs, A^k has {ak}",
            t.outputs()
        )));
    }
    Ok(())
}

/// Channel prefixing of a CAVWC at `k` letters: `W̃_r = T ∘ W_r^k` for each
/// compound state and `Ṽ_{s^k} = T ∘ V^k_{s^k}` for each `s^k ∈ S^k`.
pub fn prefix_cavwc(spec: &CavwcSpec, k: usize, t: &Channel) -> Result<CavwcSpec> {
    check_prefix(spec.input_size(), k, t)?;
    let compound = spec
        .compound
        .iter()
        .map(|w| t.then(&w.power(k)?))
        .collect::<Result<Vec<_>>>()?;
    let seqs: Vec<_> = seq::all(spec.eaves.len(), k)?.collect();
    let eaves = prefix_family(&spec.eaves, k, &seqs, t)?;
    CavwcSpec::new(compound, eaves)
}

/// Channel prefixing of an AVWC at `k` letters; both parts get state set `S^k`.
pub fn prefix_avwc(spec: &AvwcSpec, k: usize, t: &Channel) -> Result<AvwcSpec> {
    check_prefix(spec.input_size(), k, t)?;
    let seqs: Vec<_> = seq::all(spec.states(), k)?.collect();
    AvwcSpec::new(prefix_family(&spec.legit, k, &seqs, t)?, prefix_family(&spec.eaves, k, &seqs, t)?)
}

/// The CAVWC `({W_q^k : q ∈ grid}, {V^k_{s^k} : s^k ∈ S^k})` used to
/// robustify compound codes; `grid` is a finite surrogate of `P(S)`.
pub fn k_letter_lift(spec: &AvwcSpec, k: usize, q_grid: &[Distribution], budget: &Budget) -> Result<CavwcSpec> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    if q_grid.is_empty() {
        return Err(Error::OutOfRange("empty q grid".into()));
    }
    let ak = seq::count(spec.input_size(), k)? as f64;
    let bk = (spec.legit_output_size() as f64).powi(k as i32);
    let ck = (spec.eaves_output_size() as f64).powi(k as i32);
    let sk = (spec.states() as f64).powi(k as i32);
    budget.check("k-letter lift tables", ak * (bk * q_grid.len() as f64 + ck * sk))?;
    let compound = q_grid
        .iter()
        .map(|q| mix_channel(&spec.legit, q)?.power(k))
        .collect::<Result<Vec<_>>>()?;
    let seqs: Vec<_> = seq::all(spec.states(), k)?.collect();
    let eaves = seqs.iter().map(|s| product_channel(&spec.eaves, s)).collect::<Result<Vec<_>>>()?;
    CavwcSpec::new(compound, eaves)
}

/// Vertices, the uniform law, and `random` uniform-Dirichlet samples of `P(S)`.
pub fn default_q_grid<R: Rng + ?Sized>(states: usize, random: usize, rng: &mut R) -> Vec<Distribution> {
    let mut grid: Vec<Distribution> = (0..states).map(|s| Distribution::point(states, s)).collect();
    if states > 1 {
        grid.push(Distribution::uniform(states));
    }
    for _ in 0..random {
        grid.push(dirichlet_sample(states, rng));
    }
    grid
}

/// Uniform sample from the simplex (Dirichlet with unit parameters).
pub fn dirichlet_sample<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Distribution {
    let w: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    Distribution::from_weights(w).expect("exponential samples are positive")
}

/// Random stochastic matrix with uniform-Dirichlet rows.
pub fn random_channel<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Channel {
    let data = (0..inputs).flat_map(|_| dirichlet_sample(outputs, rng).probs().to_vec()).collect();
    Channel::from_flat_unchecked(inputs, outputs, data)
}
