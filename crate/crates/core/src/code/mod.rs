//! Random wiretap codes at desk-scale blocklength: construction, joint
//! typicality decoding, exact and Monte-Carlo reliability, and secrecy audits.

mod io;
mod reliability;
mod secrecy;

pub use io::{read_codebook_csv, round_sig, write_audit_csv, write_codebook_csv};
pub use reliability::{average_error, compound_states, decode_table, error_monte_carlo, error_under, ErrorReport, McError};
pub use secrecy::{
    event_frequencies, leakage, leakage_bound_from_tv, message_output_laws, secrecy_audit, theta_audit, AuditRow, EventReport,
    SecrecyAudit, ThetaAudit, ThetaMode,
};

use std::borrow::Cow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::CavwcSpec;
use crate::error::{Error, Result};
use crate::prob::{is_typical, mutual_information, typical_set_nonempty, Channel, Distribution};

/// Typicality slack used when the caller does not choose one.
pub const DEFAULT_DELTA: f64 = 0.15;

const MAX_REJECTIONS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub tau: f64,
    pub delta: f64,
    pub alpha: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub input_dist: Distribution,
}

impl CodeParams {
    pub fn new(n: usize, tau: f64, delta: f64, alpha: f64, j: usize, l: usize, input_dist: Distribution) -> Result<Self> {
        for (name, v) in [("tau", tau), ("delta", delta), ("alpha", alpha)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange(format!("{name} must be positive, got {v}")));
            }
        }
        if j == 0 || l == 0 {
            return Err(Error::OutOfRange(format!("J and L must be at least 1, got J={j}, L={l}")));
        }
        Ok(Self { n, tau, delta, alpha, j, l, input_dist })
    }

    /// Sizes derived from the channel via [`derive_code_sizes`].
    pub fn derived(cavwc: &CavwcSpec, input_dist: Distribution, n: usize, tau: f64, delta: f64, alpha: f64) -> Result<Self> {
        let (j, l) = derive_code_sizes(cavwc, &input_dist, tau, n)?;
        Self::new(n, tau, delta, alpha, j, l, input_dist)
    }

    /// `ε_n = 2^{-nα}`.
    pub fn eps(&self) -> f64 {
        (-(self.n as f64) * self.alpha).exp2()
    }
}

fn floor_pow2(exponent: f64) -> Result<usize> {
    if exponent >= 62.0 {
        return Err(Error::OutOfRange(format!("code size 2^{exponent:.3} is too large")));
    }
    Ok((exponent.exp2().floor() as usize).max(1))
}

/// `J = ⌊2^{n(R - τ)}⌋`, `L = ⌊2^{n(I_E + τ/4)}⌋`, both at least 1, where
/// `R = I_min - I_E` from the compound minimum `I_min` and eavesdropper maximum `I_E`.
pub fn code_sizes(min_legit: f64, max_eaves: f64, tau: f64, n: usize) -> Result<(usize, usize)> {
    let n = n as f64;
    Ok((floor_pow2(n * (min_legit - max_eaves - tau))?, floor_pow2(n * (max_eaves + tau / 4.0))?))
}

pub fn derive_code_sizes(cavwc: &CavwcSpec, input_dist: &Distribution, tau: f64, n: usize) -> Result<(usize, usize)> {
    let min_legit = cavwc
        .compound()
        .iter()
        .map(|w| mutual_information(input_dist, w))
        .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))?;
    let max_eaves = cavwc
        .eaves()
        .iter()
        .map(|v| mutual_information(input_dist, v))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    code_sizes(min_legit, max_eaves, tau, n)
}

/// Codewords `x_{jl}`, stored row-major in `(j, l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub params: CodeParams,
    pub seed: Option<u64>,
    words: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn from_words(params: CodeParams, words: Vec<Vec<usize>>) -> Result<Self> {
        if words.len() != params.j * params.l {
            return Err(Error::DimensionMismatch(format!(
                "{} words for J={} and L={}",
                words.len(),
                params.j,
                params.l
            )));
        }
        let a = params.input_dist.len();
        if let Some((i, w)) = words.iter().enumerate().find(|(_, w)| w.len() != params.n || w.iter().any(|&x| x >= a)) {
            return Err(Error::DimensionMismatch(format!("word {i} ({w:?}) is not a length-{} word over {a} letters", params.n)));
        }
        Ok(Self { params, seed: None, words })
    }

    pub fn word(&self, j: usize, l: usize) -> &[usize] {
        &self.words[j * self.params.l + l]
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }
}

fn sample_letter<R: Rng + ?Sized>(p: &Distribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (a, &pa) in p.probs().iter().enumerate() {
        if pa > 0.0 {
            acc += pa;
            last = a;
            if u < acc {
                return a;
            }
        }
    }
    last
}

/// One draw from `P^n` conditioned on the δ-typical set, by rejection.
pub fn sample_typical<R: Rng + ?Sized>(n: usize, p: &Distribution, delta: f64, rng: &mut R) -> Result<Vec<usize>> {
    for _ in 0..MAX_REJECTIONS {
        let x: Vec<usize> = (0..n).map(|_| sample_letter(p, rng)).collect();
        if is_typical(&x, p, delta) {
            return Ok(x);
        }
    }
    Err(Error::OutOfRange(format!(
        "no typical word after {MAX_REJECTIONS} draws at n={n}, delta={delta}; raise delta"
    )))
}

/// Draws `J·L` i.i.d. words from `P'`, the input law truncated to its typical set.
pub fn sample_codebook<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Result<Codebook> {
    if !typical_set_nonempty(params.n, &params.input_dist, params.delta) {
        return Err(Error::EmptyTypicalSet { n: params.n, delta: params.delta });
    }
    let words = (0..params.j * params.l)
        .map(|_| sample_typical(params.n, &params.input_dist, params.delta, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(Codebook { params: params.clone(), seed: None, words })
}

/// Anything with an encoder table and a total decoder.
pub trait Code: Sync {
    fn n(&self) -> usize;
    fn messages(&self) -> usize;
    fn randomness(&self) -> usize;
    fn word(&self, j: usize, l: usize) -> Cow<'_, [usize]>;
    fn decode(&self, y: &[usize]) -> (usize, usize);

    /// `P(x|j) = #{l : x_{jl} = x} / L`, listed over the distinct words of row `j`.
    fn encoder_row(&self, j: usize) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
        let w = 1.0 / self.randomness() as f64;
        for l in 0..self.randomness() {
            let x = self.word(j, l).into_owned();
            match out.iter_mut().find(|(y, _)| *y == x) {
                Some((_, p)) => *p += w,
                None => out.push((x, w)),
            }
        }
        out
    }
}

/// Codebook with the union-of-typical-shells decoder for a finite compound list.
#[derive(Clone, Debug, PartialEq)]
pub struct WiretapCode {
    pub codebook: Codebook,
    pub compound: Vec<Channel>,
}

impl WiretapCode {
    pub fn new(codebook: Codebook, compound: Vec<Channel>) -> Result<Self> {
        let a = codebook.params.input_dist.len();
        if compound.is_empty() || compound.iter().any(|w| w.inputs() != a || w.outputs() != compound[0].outputs()) {
            return Err(Error::DimensionMismatch("compound list does not match the input alphabet".into()));
        }
        Ok(Self { codebook, compound })
    }

    pub fn params(&self) -> &CodeParams {
        &self.codebook.params
    }

    pub fn output_size(&self) -> usize {
        self.compound[0].outputs()
    }

    /// Uniform `l`, then `x_{jl}`.
    pub fn encode<R: Rng + ?Sized>(&self, j: usize, rng: &mut R) -> Result<Vec<usize>> {
        if j >= self.codebook.params.j {
            return Err(Error::OutOfRange(format!("message {j} outside 0..{}", self.codebook.params.j)));
        }
        let l = rng.random_range(0..self.codebook.params.l);
        Ok(self.codebook.word(j, l).to_vec())
    }

    /// True if `y` lies in the conditional typical shell of `x_{jl}` for some compound member.
    pub fn claims(&self, j: usize, l: usize, y: &[usize]) -> bool {
        let x = self.codebook.word(j, l);
        let delta = self.codebook.params.delta;
        self.compound.iter().any(|w| crate::prob::cond_typical_unchecked(y, x, w, delta))
    }
}

impl Code for WiretapCode {
    fn n(&self) -> usize {
        self.codebook.params.n
    }

    fn messages(&self) -> usize {
        self.codebook.params.j
    }

    fn randomness(&self) -> usize {
        self.codebook.params.l
    }

    fn word(&self, j: usize, l: usize) -> Cow<'_, [usize]> {
        Cow::Borrowed(self.codebook.word(j, l))
    }

    /// The unique claiming pair, or `(0, 0)` when `y` is claimed by none or several.
    fn decode(&self, y: &[usize]) -> (usize, usize) {
        let p = &self.codebook.params;
        let mut found = None;
        for j in 0..p.j {
            for l in 0..p.l {
                if self.claims(j, l, y) {
                    if found.is_some() {
                        return (0, 0);
                    }
                    found = Some((j, l));
                }
            }
        }
        found.unwrap_or((0, 0))
    }
}
