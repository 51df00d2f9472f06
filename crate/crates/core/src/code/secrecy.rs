use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reliability::{check_states, decode_table, error_under, sequence_law};
use super::{sample_codebook, sample_typical, Code, CodeParams, WiretapCode};
use crate::budget::Budget;
use crate::channel::mix_channel;
use crate::error::{Error, Result};
use crate::prob::{
    chernoff_bound, conditional_entropy, cond_typical_unchecked, f2_bound, is_typical, mi_continuity_modulus,
    mi_raw, tv_distance, type_of, typical_set, typicality_tail_bound, Channel, Distribution, TypicalityParams,
};
use crate::seq;

/// `P_{Z|M=j} = (1/L) Σ_l V^n_{s^n}(·|x_{jl})` for every message.
pub fn message_output_laws<C: Code + ?Sized>(code: &C, family: &[Channel], s: &[usize]) -> Vec<Vec<f64>> {
    let outputs = family[0].outputs();
    let w = 1.0 / code.randomness() as f64;
    (0..code.messages())
        .map(|j| {
            let mut acc = vec![0.0; seq::count(outputs, code.n()).expect("checked by caller")];
            for l in 0..code.randomness() {
                let law = sequence_law(&code.word(j, l), family, s, outputs);
                acc.iter_mut().zip(law).for_each(|(a, p)| *a += w * p);
            }
            acc
        })
        .collect()
}

/// Exact `I(M; Z^n_{s^n})` in bits with `M` uniform.
pub fn leakage<C: Code + ?Sized>(code: &C, family: &[Channel], s: &[usize], budget: &Budget) -> Result<f64> {
    check_states(family, std::slice::from_ref(&s.to_vec()), code.n())?;
    let cn = seq::count(family[0].outputs(), code.n())?;
    budget.check("leakage over C^n", (code.messages() * code.randomness()) as f64 * cn as f64)?;
    let laws = message_output_laws(code, family, s);
    let flat: Vec<f64> = laws.concat();
    let pm = vec![1.0 / code.messages() as f64; code.messages()];
    Ok(mi_raw(&pm, &flat, cn))
}

/// Upper bound on `I(M;Z)` implied by `max_j ||P_{Z|j} - Θ|| <= t`:
/// every `P_{Z|j}` is within `2t` of `P_Z`, and entropy is continuous in
/// total variation. `None` when `2t > 1/2`.
pub fn leakage_bound_from_tv(t: f64, outputs: usize, n: usize) -> Option<f64> {
    mi_continuity_modulus(2.0 * t, (outputs as f64).powi(n as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThetaMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// The codebook-independent part of the audit.
struct ThetaModel {
    q_rows: Channel,
    eps: f64,
    threshold: f64,
    typical_z: Vec<bool>,
    theta_tilde: Vec<f64>,
    theta_tilde_sigma: Option<Vec<f64>>,
    theta: Vec<f64>,
    iota2_tail: f64,
    mass_tail: f64,
}

impl ThetaModel {
    fn build(params: &CodeParams, family: &[Channel], s: &[usize], mode: ThetaMode, budget: &Budget) -> Result<Self> {
        check_states(family, std::slice::from_ref(&s.to_vec()), params.n)?;
        let (n, a, states, c) = (params.n, params.input_dist.len(), family.len(), family[0].outputs());
        if family[0].inputs() != a {
            return Err(Error::DimensionMismatch("eavesdropper family does not match the input alphabet".into()));
        }
        let delta = params.delta;
        let q = if n == 0 { Distribution::uniform(states) } else { type_of(s, states)? };
        let vq = mix_channel(family, &q)?;
        let pz = vq.output_distribution(&params.input_dist)?;
        let cn = seq::count(c, n)?;
        let dz = 4.0 * (a * states) as f64 * delta;
        let typical_z: Vec<bool> = (0..cn).map(|i| is_typical(&seq::decode(i, c, n), &pz, dz)).collect();
        let t_count = typical_z.iter().filter(|b| **b).count();
        let h = conditional_entropy(&params.input_dist, &vq)?;
        let threshold = (-(n as f64) * (h - f2_bound(&vq, 3.0 * states as f64 * delta))).exp2();
        let e1 = |law: &[f64]| -> Vec<f64> {
            law.iter().zip(&typical_z).map(|(p, t)| if *t && *p <= threshold { *p } else { 0.0 }).collect()
        };

        let (theta_tilde, theta_tilde_sigma) = match mode {
            ThetaMode::Exact => {
                let tx = typical_set(n, &params.input_dist, delta);
                budget.check("theta audit over T_X x C^n", tx.len() as f64 * cn as f64 * n.max(1) as f64)?;
                let weights: Vec<f64> = tx.iter().map(|x| params.input_dist.product_prob(x)).collect();
                let total: f64 = weights.iter().sum();
                if total == 0.0 {
                    return Err(Error::EmptyTypicalSet { n, delta });
                }
                let parts: Vec<Vec<f64>> = tx
                    .par_iter()
                    .zip(&weights)
                    .map(|(x, w)| e1(&sequence_law(x, family, s, c)).into_iter().map(|v| v * w / total).collect())
                    .collect();
                let mut acc = vec![0.0; cn];
                for p in parts {
                    acc.iter_mut().zip(p).for_each(|(a, v)| *a += v);
                }
                (acc, None)
            }
            ThetaMode::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::OutOfRange("need at least one sample".into()));
                }
                budget.check("theta audit samples", samples as f64 * cn as f64)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut sum = vec![0.0; cn];
                let mut sq = vec![0.0; cn];
                for _ in 0..samples {
                    let x = sample_typical(n, &params.input_dist, delta, &mut rng)?;
                    for (z, v) in e1(&sequence_law(&x, family, s, c)).into_iter().enumerate() {
                        sum[z] += v;
                        sq[z] += v * v;
                    }
                }
                let m = samples as f64;
                let mean: Vec<f64> = sum.iter().map(|v| v / m).collect();
                let sigma = mean.iter().zip(&sq).map(|(mu, s2)| ((s2 / m - mu * mu).max(0.0) / m).sqrt()).collect();
                (mean, Some(sigma))
            }
        };
        let eps = params.eps();
        let cut = if t_count == 0 { f64::INFINITY } else { eps / t_count as f64 };
        let theta = theta_tilde.iter().zip(&typical_z).map(|(v, t)| if *t && *v >= cut { *v } else { 0.0 }).collect();
        Ok(Self {
            q_rows: Channel::constant(a, &q),
            eps,
            threshold,
            typical_z,
            theta_tilde,
            theta_tilde_sigma,
            theta,
            iota2_tail: typicality_tail_bound(&TypicalityParams::new(n, 2.0 * delta)?, a * states),
            mass_tail: typicality_tail_bound(&TypicalityParams::new(n, delta)?, a * states * c),
        })
    }

    /// `Q_{s^n,z}(x) = V^n(z|x) 1_{E1}(x,z) 1_{E2}(z)`.
    fn q_row(&self, law: &[f64]) -> impl Iterator<Item = f64> + '_ {
        law.iter()
            .zip(&self.typical_z)
            .zip(&self.theta)
            .map(|((p, t), th)| if *t && *th > 0.0 && *p <= self.threshold { *p } else { 0.0 })
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// `(ι1 violations, (j,z) pairs checked, ι2 violations)`.
    fn iota<C: Code + ?Sized>(&self, code: &C, params: &CodeParams, family: &[Channel], s: &[usize]) -> (usize, usize, usize) {
        let c = family[0].outputs();
        let ln = code.randomness() as f64;
        let need = (1.0 - self.eps) * (1.0 - self.iota2_tail) * ln;
        let support = self.theta.iter().filter(|t| **t > 0.0).count();
        let (mut v1, mut v2) = (0, 0);
        for j in 0..code.messages() {
            let mut avg = vec![0.0; self.theta.len()];
            let mut good = 0usize;
            for l in 0..code.randomness() {
                let x = code.word(j, l);
                let law = sequence_law(&x, family, s, c);
                avg.iter_mut().zip(self.q_row(&law)).for_each(|(a, v)| *a += v / ln);
                if cond_typical_unchecked(s, &x, &self.q_rows, 2.0 * params.delta) {
                    good += 1;
                }
            }
            for (a, th) in avg.iter().zip(&self.theta) {
                let slack = 1e-12 * th;
                if *th > 0.0 && (*a < (1.0 - self.eps) * th - slack || *a > (1.0 + self.eps) * th + slack) {
                    v1 += 1;
                }
            }
            if (good as f64) < need {
                v2 += 1;
            }
        }
        (v1, support * code.messages(), v2)
    }
}

/// Resolvability audit of one state sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaAudit {
    pub s_n: Vec<usize>,
    pub delta: f64,
    pub mode: ThetaMode,
    pub leakage_bits: f64,
    /// `max_j ||P_{Z|j} - Θ||`.
    pub tv_to_theta: f64,
    /// `max_{j,j'} ||P_{Z|j} - P_{Z|j'}||`.
    pub pairwise_tv: f64,
    pub theta_mass: f64,
    /// `1 - 2·tail - ε_n` with the instantiated tail bound.
    pub theta_lower_bound: f64,
    pub bound_holds: bool,
    /// The lower bound is `≤ 0`, so holding says nothing.
    pub bound_vacuous: bool,
    pub iota1_violations: usize,
    pub iota1_checked: usize,
    pub iota2_violations: usize,
    #[serde(skip)]
    pub theta_tilde: Vec<f64>,
    #[serde(skip)]
    pub theta_tilde_sigma: Option<Vec<f64>>,
}

impl ThetaAudit {
    /// Set when the mass bound fails at this blocklength.
    pub fn small_n_flag(&self) -> bool {
        !self.bound_holds
    }
}

pub fn theta_audit(
    code: &WiretapCode,
    family: &[Channel],
    s: &[usize],
    mode: ThetaMode,
    budget: &Budget,
) -> Result<ThetaAudit> {
    let params = code.params();
    let model = ThetaModel::build(params, family, s, mode, budget)?;
    let laws = message_output_laws(code, family, s);
    let mut tv_to_theta = 0.0f64;
    let mut pairwise_tv = 0.0f64;
    for (i, a) in laws.iter().enumerate() {
        tv_to_theta = tv_to_theta.max(tv_distance(a, &model.theta)?);
        for b in &laws[i + 1..] {
            pairwise_tv = pairwise_tv.max(tv_distance(a, b)?);
        }
    }
    let cn = model.theta.len();
    let pm = vec![1.0 / laws.len() as f64; laws.len()];
    let leakage_bits = mi_raw(&pm, &laws.concat(), cn);
    let theta_mass: f64 = model.theta.iter().sum();
    let theta_lower_bound = 1.0 - 2.0 * model.mass_tail - model.eps;
    let (iota1_violations, iota1_checked, iota2_violations) = model.iota(code, params, family, s);
    Ok(ThetaAudit {
        s_n: s.to_vec(),
        delta: params.delta,
        mode,
        leakage_bits,
        tv_to_theta,
        pairwise_tv,
        theta_mass,
        theta_lower_bound,
        bound_holds: theta_mass >= theta_lower_bound,
        bound_vacuous: theta_lower_bound <= 0.0,
        iota1_violations,
        iota1_checked,
        iota2_violations,
        theta_tilde: model.theta_tilde,
        theta_tilde_sigma: model.theta_tilde_sigma,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub s_n: Vec<usize>,
    pub leakage_bits: f64,
    pub tv_audit: f64,
    /// Message error of the legitimate receiver under the same state sequence.
    pub error: f64,
    pub theta: ThetaAudit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecrecyAudit {
    pub rows: Vec<AuditRow>,
    pub max_leakage: f64,
    pub max_tv: f64,
    /// Fraction of rows whose Θ-mass bound failed.
    pub flag_rate: f64,
}

/// Audits every state sequence in `states`; rows keep the input order.
pub fn secrecy_audit(
    code: &WiretapCode,
    legit: &[Channel],
    eaves: &[Channel],
    states: &[Vec<usize>],
    mode: ThetaMode,
    budget: &Budget,
) -> Result<SecrecyAudit> {
    check_states(legit, states, code.n())?;
    if states.is_empty() {
        return Err(Error::OutOfRange("no state sequences to audit".into()));
    }
    let table = decode_table(code, legit[0].outputs(), budget)?;
    let rows = states
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let m = match mode {
                ThetaMode::MonteCarlo { samples, seed } => ThetaMode::MonteCarlo { samples, seed: seed.wrapping_add(i as u64) },
                ThetaMode::Exact => ThetaMode::Exact,
            };
            let theta = theta_audit(code, eaves, s, m, budget)?;
            let error = error_under(code, &table, legit, s).0;
            Ok(AuditRow { s_n: s.clone(), leakage_bits: theta.leakage_bits, tv_audit: theta.tv_to_theta, error, theta })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_leakage = rows.iter().map(|r| r.leakage_bits).fold(0.0, f64::max);
    let max_tv = rows.iter().map(|r| r.tv_audit).fold(0.0, f64::max);
    let flag_rate = rows.iter().filter(|r| r.theta.small_n_flag()).count() as f64 / rows.len() as f64;
    Ok(SecrecyAudit { rows, max_leakage, max_tv, flag_rate })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub trials: usize,
    /// Fraction of `(codebook, j, z ∈ supp Θ)` with the `ι1` bracket violated.
    pub iota1_freq: f64,
    /// Largest per-`(j,z)` Chernoff prediction; `None` when `ε_n ≥ 1/2`.
    pub iota1_bound: Option<f64>,
    /// Fraction of `(codebook, j)` with too few state-typical indices `l`.
    pub iota2_freq: f64,
    /// Per-index probability bound that `s^n` is not conditionally typical.
    pub iota2_tail: f64,
}

/// Resamples codebooks and measures how often the events `ι1`, `ι2` fail.
pub fn event_frequencies(
    params: &CodeParams,
    compound: &[Channel],
    eaves: &[Channel],
    s: &[usize],
    trials: usize,
    seed: u64,
    budget: &Budget,
) -> Result<EventReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    let model = ThetaModel::build(params, eaves, s, ThetaMode::Exact, budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut v1, mut n1, mut v2) = (0usize, 0usize, 0usize);
    for _ in 0..trials {
        let code = WiretapCode::new(sample_codebook(params, &mut rng)?, compound.to_vec())?;
        let (a, b, c) = model.iota(&code, params, eaves, s);
        v1 += a;
        n1 += b;
        v2 += c;
    }
    let iota1_bound = if model.eps < 0.5 {
        model
            .theta
            .iter()
            .filter(|t| **t > 0.0)
            .map(|t| chernoff_bound(params.l, *t, model.threshold, model.eps))
            .try_fold(0.0f64, |m, b| b.map(|b| m.max(b)))?
            .into()
    } else {
        None
    };
    Ok(EventReport {
        trials,
        iota1_freq: if n1 == 0 { 0.0 } else { v1 as f64 / n1 as f64 },
        iota1_bound,
        iota2_freq: v2 as f64 / (trials * params.j) as f64,
        iota2_tail: model.iota2_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Codebook;

    fn small_code(compound: Channel) -> WiretapCode {
        let p = CodeParams::new(2, 0.1, 0.3, 0.1, 2, 2, Distribution::uniform(2)).unwrap();
        let words = vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![0, 0]];
        WiretapCode::new(Codebook::from_words(p, words).unwrap(), vec![compound]).unwrap()
    }

    #[test]
    fn leakage_examples() {
        let b = Budget::default();
        let flat = Channel::constant(2, &Distribution::uniform(2));
        let code = small_code(Channel::bsc(0.1));
        assert_eq!(leakage(&code, &[flat], &[0, 0], &b).unwrap(), 0.0);

        let p = CodeParams::new(2, 0.1, 0.3, 0.1, 4, 1, Distribution::uniform(2)).unwrap();
        let words = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let full = WiretapCode::new(Codebook::from_words(p, words).unwrap(), vec![Channel::identity(2)]).unwrap();
        assert!((leakage(&full, &[Channel::identity(2)], &[0, 0], &b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_eavesdropper_audit() {
        let flat = Channel::constant(2, &Distribution::new(vec![0.3, 0.7]).unwrap());
        let code = small_code(Channel::bsc(0.1));
        let a = theta_audit(&code, &[flat], &[0, 0], ThetaMode::Exact, &Budget::default()).unwrap();
        assert_eq!(a.pairwise_tv, 0.0);
        assert_eq!(a.leakage_bits, 0.0);
        assert!(a.theta_mass <= 1.0 + 1e-12);
    }

    #[test]
    fn deterministic_input_collapses_expectation() {
        let p = CodeParams::new(4, 0.1, 0.1, 0.5, 1, 2, Distribution::point(2, 1)).unwrap();
        let cb = Codebook::from_words(p, vec![vec![1; 4], vec![1; 4]]).unwrap();
        let code = WiretapCode::new(cb, vec![Channel::bsc(0.1)]).unwrap();
        let fam = vec![Channel::bsc(0.2)];
        let a = theta_audit(&code, &fam, &[0; 4], ThetaMode::Exact, &Budget::default()).unwrap();
        let law = sequence_law(&[1; 4], &fam, &[0; 4], 2);
        let m = ThetaModel::build(code.params(), &fam, &[0; 4], ThetaMode::Exact, &Budget::default()).unwrap();
        for (z, (t, p)) in a.theta_tilde.iter().zip(&law).enumerate() {
            let in_e1 = m.typical_z[z] && *p <= m.threshold;
            assert_eq!(*t, if in_e1 { *p } else { 0.0 });
        }
    }

    #[test]
    fn large_delta_counts_every_index() {
        let p = CodeParams::new(6, 0.1, 2.0, 0.1, 2, 8, Distribution::uniform(2)).unwrap();
        let r = event_frequencies(&p, &[Channel::bsc(0.1)], &[Channel::bsc(0.3), Channel::bsc(0.4)], &[0, 1, 0, 1, 1, 0], 5, 3, &Budget::default()).unwrap();
        assert_eq!(r.iota2_freq, 0.0);
    }
}
