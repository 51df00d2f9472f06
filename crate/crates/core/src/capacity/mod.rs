//! Numerical evaluation of multi-letter and single-letter secrecy rates.
//!
//! All maximisations are local searches from many starts; every reported
//! value is attained by the returned input structure, so it is a valid
//! lower bound for the supremum it estimates.

mod continuity;
mod engine;
mod oracle;

pub use continuity::{continuity_probe, perturb, ContinuityReport, ContinuityRow};
pub use oracle::brute_force_oracle;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::channel::{
    best_eavesdropper_check, mix_channel, product_channel, strongly_degraded_check, AvwcSpec, CavwcSpec,
};
use crate::error::{Error, Result};
use crate::prob::{mutual_information, Channel, Distribution};
use crate::seq;
use engine::{random_rows, Effort, Engine, Eval, Legit, Local};

/// `(P_U, P_{X^k|U})` with `|U| ≤ |A|^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputStructure {
    pub k: usize,
    pub u_size: usize,
    pub p_u: Distribution,
    pub p_x_given_u: Channel,
}

impl InputStructure {
    pub fn new(k: usize, input_alphabet: usize, p_u: Distribution, p_x_given_u: Channel) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange("k must be at least 1".into()));
        }
        let ak = seq::count(input_alphabet, k)?;
        if p_x_given_u.inputs() != p_u.len() || p_x_given_u.outputs() != ak {
            return Err(Error::DimensionMismatch(format!(
                "P_X|U is {}x{}, expected {}x{ak}",
                p_x_given_u.inputs(),
                p_x_given_u.outputs(),
                p_u.len()
            )));
        }
        if p_u.len() > ak {
            return Err(Error::OutOfRange(format!("|U| = {} exceeds |A|^k = {ak}", p_u.len())));
        }
        Ok(Self { k, u_size: p_u.len(), p_u, p_x_given_u })
    }

    /// A single auxiliary letter; always rate zero.
    pub fn constant(k: usize, input_alphabet: usize) -> Result<Self> {
        let ak = seq::count(input_alphabet, k)?;
        Self::new(k, input_alphabet, Distribution::point(1, 0), Channel::constant(1, &Distribution::point(ak, 0)))
    }

    /// `U = X^k` with the given input law.
    pub fn direct(k: usize, input_alphabet: usize, p_x: Distribution) -> Result<Self> {
        let ak = seq::count(input_alphabet, k)?;
        Self::new(k, input_alphabet, p_x, Channel::identity(ak))
    }

    /// Independent concatenation: `U = (U_1, U_2)`, `X^{k1+k2} = (X^{k1}, X^{k2})`.
    pub fn tensor(&self, other: &InputStructure, input_alphabet: usize) -> Result<Self> {
        let p = Distribution::new(
            self.p_u
                .probs()
                .iter()
                .flat_map(|a| other.p_u.probs().iter().map(move |b| a * b))
                .collect(),
        )?;
        Self::new(self.k + other.k, input_alphabet, p, self.p_x_given_u.tensor(&other.p_x_given_u)?)
    }
}

/// Optimiser bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub restarts: usize,
    pub iterations: usize,
    /// Index of the winning restart.
    pub best_restart: usize,
    /// Size of a unit projected-gradient step at the reported point.
    pub gap_proxy: f64,
    /// True when the inner minimum over mixtures is non-convex (`k ≥ 2`).
    pub heuristic_min: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value_bits_per_letter: f64,
    pub k: usize,
    pub argmax: InputStructure,
    pub worst_q: Distribution,
    pub worst_s_k: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl CapacityEstimate {
    pub const CSV_HEADER: &'static str = "k,value,restarts,iterations,gap_proxy,heuristic_min";

    pub fn csv_row(&self) -> String {
        let d = &self.diagnostics;
        format!(
            "{},{:.12},{},{},{:.6e},{}",
            self.k, self.value_bits_per_letter, d.restarts, d.iterations, d.gap_proxy, d.heuristic_min
        )
    }
}

#[derive(Clone, Debug)]
pub struct CapacityOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Outer optimiser tolerance (bits).
    pub tol: f64,
    /// Frank-Wolfe gap at which inner minimisations stop (bits).
    pub inner_tol: f64,
    pub seed: u64,
    /// Optional cap on `|U|` below `|A|^k`; results remain lower bounds.
    pub u_cap: Option<usize>,
    pub budget: Budget,
    /// Extra starting structure.
    pub warm_start: Option<InputStructure>,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 300,
            tol: 1e-6,
            inner_tol: 1e-7,
            seed: 0,
            u_cap: None,
            budget: Budget::default(),
            warm_start: None,
        }
    }
}

/// Distinct channels in first-appearance order, with the original index of each.
fn dedupe(family: &[Channel]) -> (Vec<Channel>, Vec<usize>) {
    let mut uniq: Vec<Channel> = Vec::new();
    let mut first = Vec::new();
    for (i, c) in family.iter().enumerate() {
        if !uniq.contains(c) {
            uniq.push(c.clone());
            first.push(i);
        }
    }
    (uniq, first)
}

fn lift_weights(q: &[f64], first: &[usize], total: usize) -> Distribution {
    let mut out = vec![0.0; total];
    for (w, &i) in q.iter().zip(first) {
        out[i] = *w;
    }
    Distribution::from_weights(out).expect("weights from the simplex")
}

struct Prepared {
    engine: Engine,
    legit_first: Vec<usize>,
    legit_total: usize,
    /// Original state sequence for each eavesdropper table.
    eaves_labels: Vec<Vec<usize>>,
}

fn eaves_tables(eaves: &[Channel], k: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<usize>>)> {
    let (uniq, first) = dedupe(eaves);
    let mut tables = Vec::new();
    let mut labels = Vec::new();
    for s in seq::all(uniq.len(), k)? {
        tables.push(product_channel(&uniq, &s)?.as_flat().to_vec());
        labels.push(s.iter().map(|&i| first[i]).collect());
    }
    Ok((tables, labels))
}

fn check_budget(budget: &Budget, u: usize, ak: usize, bk: usize, ck: usize, tables: usize, opts: &CapacityOptions) -> Result<()> {
    let per_eval = (u * ak) as f64 * (bk + ck * tables) as f64;
    budget.check("capacity search", per_eval * (opts.restarts.max(1) * opts.max_iters.max(1)) as f64)
}

fn prepare_hull(legit: &[Channel], eaves: &[Channel], k: usize, opts: &CapacityOptions) -> Result<Prepared> {
    let a = legit[0].inputs();
    let (b, c) = (legit[0].outputs(), eaves[0].outputs());
    let ak = seq::count(a, k)?;
    let (bk, ck) = (seq::count(b, k)?, seq::count(c, k)?);
    let sv = dedupe(eaves).0.len();
    let u = opts.u_cap.map_or(ak, |cap| cap.clamp(1, ak));
    check_budget(&opts.budget, u, ak, bk, ck, seq::count(sv, k)?, opts)?;
    let (uniq, legit_first) = dedupe(legit);
    let (tables, eaves_labels) = eaves_tables(eaves, k)?;
    Ok(Prepared {
        engine: Engine {
            k,
            ak,
            bk,
            ck,
            legit: Legit::Hull { family: uniq.iter().map(|c| c.as_flat().to_vec()).collect(), a, b },
            eaves: tables,
            inner_tol: opts.inner_tol,
        },
        legit_first,
        legit_total: legit.len(),
        eaves_labels,
    })
}

fn seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut root = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| root.next_u64()).collect()
}

struct Start {
    p: Vec<f64>,
    g: Vec<f64>,
}

fn structure_start(s: &InputStructure) -> Start {
    Start { p: s.p_u.probs().to_vec(), g: s.p_x_given_u.as_flat().to_vec() }
}

fn random_starts(engine: &Engine, u: usize, fixed_g: bool, count: usize, seed: u64) -> Vec<Start> {
    let ak = engine.ak;
    let identity: Vec<f64> = (0..u * ak).map(|i| if i / ak == i % ak { 1.0 } else { 0.0 }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let p = if i == 0 {
            vec![1.0 / u as f64; u]
        } else {
            crate::channel::dirichlet_sample(u, &mut rng).probs().to_vec()
        };
        let g = if fixed_g || (i == 0 && u == ak) {
            identity.clone()
        } else if i % 3 == 1 {
            (0..u).flat_map(|_| {
                let x = rng.random_range(0..ak);
                (0..ak).map(move |j| if j == x { 1.0 } else { 0.0 })
            })
            .collect()
        } else {
            random_rows(u, ak, &mut rng)
        };
        out.push(Start { p, g });
    }
    out
}

struct Outcome {
    local: Local,
    careful: Eval,
}

fn run(engine: &Engine, starts: Vec<Start>, fixed_g: bool, opts: &CapacityOptions) -> (Vec<Outcome>, usize) {
    let seeds = seeds(opts.seed ^ 0x5eed, starts.len());
    let outcomes: Vec<Outcome> = starts
        .into_par_iter()
        .zip(seeds)
        .map(|(st, seed)| {
            let local = engine.ascend(st.p, st.g, fixed_g, opts.max_iters, opts.tol);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let careful =
                engine.evaluate(&local.p, &local.g, Some(&local.eval.legit.q), Effort::Careful, Some(&mut rng));
            Outcome { local, careful }
        })
        .collect();
    let best = outcomes
        .iter()
        .enumerate()
        .fold(0, |b, (i, o)| if o.careful.value > outcomes[b].careful.value { i } else { b });
    (outcomes, best)
}

fn finish(
    prep: &Prepared,
    outcomes: &[Outcome],
    best: usize,
    input_alphabet: usize,
) -> Result<CapacityEstimate> {
    let engine = &prep.engine;
    let k = engine.k;
    let o = &outcomes[best];
    let iterations = outcomes.iter().map(|o| o.local.iterations).sum();
    let mut diagnostics = Diagnostics {
        restarts: outcomes.len(),
        iterations,
        best_restart: best,
        gap_proxy: o.local.stationarity,
        heuristic_min: o.careful.legit.heuristic,
    };
    let (argmax, eval) = if o.careful.value > 0.0 {
        let u = o.local.p.len();
        let structure = InputStructure::new(
            k,
            input_alphabet,
            Distribution::from_weights(o.local.p.clone())?,
            Channel::from_flat(u, engine.ak, o.local.g.clone())?,
        )?;
        (structure, o.careful.clone())
    } else {
        let c = InputStructure::constant(k, input_alphabet)?;
        let e = engine.evaluate(c.p_u.probs(), c.p_x_given_u.as_flat(), None, Effort::Careful, None);
        diagnostics.gap_proxy = 0.0;
        (c, e)
    };
    Ok(CapacityEstimate {
        value_bits_per_letter: (eval.value / k as f64).max(0.0),
        k,
        worst_q: lift_weights(&eval.legit.q, &prep.legit_first, prep.legit_total),
        worst_s_k: prep.eaves_labels[eval.worst_eaves()].clone(),
        argmax,
        diagnostics,
    })
}

fn check_structure(avwc_inputs: usize, s: &InputStructure) -> Result<usize> {
    let ak = seq::count(avwc_inputs, s.k)?;
    if s.p_x_given_u.outputs() != ak || s.p_x_given_u.inputs() != s.p_u.len() {
        return Err(Error::DimensionMismatch("input structure does not match the input alphabet".into()));
    }
    Ok(ak)
}

/// `I(U;Y_q^k) - max_{s^k} I(U;Z^k_{s^k})` in bits (not divided by `k`),
/// computed directly from the joint tables.
pub fn inner_objective(avwc: &AvwcSpec, s: &InputStructure, q: &Distribution, budget: &Budget) -> Result<f64> {
    let ak = check_structure(avwc.input_size(), s)?;
    let k = s.k;
    let bk = seq::count(avwc.legit_output_size(), k)?;
    let ck = seq::count(avwc.eaves_output_size(), k)?;
    let sk = seq::count(avwc.states(), k)?;
    budget.check("inner objective tables", (s.u_size * ak) as f64 * (bk + sk * ck) as f64)?;
    let wq = mix_channel(avwc.legit(), q)?.power(k)?;
    let legit = mutual_information(&s.p_u, &s.p_x_given_u.then(&wq)?)?;
    let mut top = f64::NEG_INFINITY;
    for seq_s in seq::all(avwc.states(), k)? {
        let v = product_channel(avwc.eaves(), &seq_s)?;
        top = top.max(mutual_information(&s.p_u, &s.p_x_given_u.then(&v)?)?);
    }
    Ok(legit - top)
}

/// `min_q I(U;Y_q^k)` over the whole simplex. The flag is true for `k ≥ 2`,
/// where the minimum is a multi-start local search.
pub fn min_over_compound(avwc: &AvwcSpec, s: &InputStructure, opts: &CapacityOptions) -> Result<(Distribution, f64, bool)> {
    check_structure(avwc.input_size(), s)?;
    let prep = prepare_hull(avwc.legit(), avwc.eaves(), s.k, &CapacityOptions { restarts: 1, max_iters: 1, ..opts.clone() })?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let m = prep.engine.legit_min(s.p_u.probs(), s.p_x_given_u.as_flat(), None, Effort::Careful, Some(&mut rng));
    Ok((lift_weights(&m.q, &prep.legit_first, prep.legit_total), m.value, m.heuristic))
}

/// `(1/k) max [min_q I(U;Y_q^k) - max_{s^k} I(U;Z^k_{s^k})]`, clamped at 0.
///
/// For `k ≥ 2` the tensor power of the `k = 1` optimum is always among the
/// starts, so the `k`-letter value never falls below the single-letter one
/// by more than the inner tolerance.
pub fn evaluate_rsk(avwc: &AvwcSpec, k: usize, opts: &CapacityOptions) -> Result<CapacityEstimate> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    let a = avwc.input_size();
    let prep = prepare_hull(avwc.legit(), avwc.eaves(), k, opts)?;
    let u = opts.u_cap.map_or(prep.engine.ak, |cap| cap.clamp(1, prep.engine.ak));
    let mut starts = random_starts(&prep.engine, u, false, opts.restarts.max(1), opts.seed);
    if let Some(w) = &opts.warm_start {
        if w.k == k && check_structure(a, w).is_ok() {
            starts.push(structure_start(w));
        }
    }
    if k >= 2 {
        let single = evaluate_rsk(avwc, 1, &CapacityOptions { warm_start: None, ..opts.clone() })?;
        let mut t = single.argmax.clone();
        for _ in 1..k {
            t = t.tensor(&single.argmax, a)?;
        }
        if t.u_size <= prep.engine.ak {
            starts.push(structure_start(&t));
        }
    }
    let (outcomes, best) = run(&prep.engine, starts, false, opts);
    finish(&prep, &outcomes, best, a)
}

fn direct_starts(engine: &Engine, opts: &CapacityOptions) -> Vec<Start> {
    random_starts(engine, engine.ak, true, opts.restarts.max(1), opts.seed)
}

/// `max_{P_X} [min_r I(X;Y_r) - max_s I(X;Z_s)]` over a finite compound list.
/// `worst_q` is a point mass on the minimising compound member.
pub fn evaluate_rs_dagger(cavwc: &CavwcSpec, opts: &CapacityOptions) -> Result<CapacityEstimate> {
    let a = cavwc.input_size();
    let (b, c) = (cavwc.legit_output_size(), cavwc.eaves_output_size());
    let (uniq, legit_first) = dedupe(cavwc.compound());
    let (tables, eaves_labels) = eaves_tables(cavwc.eaves(), 1)?;
    check_budget(&opts.budget, a, a, b, c, tables.len(), opts)?;
    let prep = Prepared {
        engine: Engine {
            k: 1,
            ak: a,
            bk: b,
            ck: c,
            legit: Legit::List { channels: uniq.iter().map(|c| c.as_flat().to_vec()).collect() },
            eaves: tables,
            inner_tol: opts.inner_tol,
        },
        legit_first,
        legit_total: cavwc.compound().len(),
        eaves_labels,
    };
    let (outcomes, best) = run(&prep.engine, direct_starts(&prep.engine, opts), true, opts);
    finish(&prep, &outcomes, best, a)
}

/// Single-letter formula for strongly degraded AVWCs with a best eavesdropper
/// channel: `max_{P_X} [min_{q1} I(X;Y_{q1}) - max_{s2} I(X;Z_{s2})]`.
///
/// States are indexed `s = s1 * s2_count + s2`. Fails with a structural
/// error if either precondition is refuted on `q1_grid`.
pub fn evaluate_single_letter_degraded(
    avwc: &AvwcSpec,
    s1_count: usize,
    s2_count: usize,
    q1_grid: &[Distribution],
    opts: &CapacityOptions,
) -> Result<CapacityEstimate> {
    let strong = strongly_degraded_check(avwc, s1_count, s2_count, q1_grid)?;
    if !strong.holds {
        let (g, s2) = strong
            .witnesses
            .iter()
            .enumerate()
            .find_map(|(g, row)| row.iter().position(|c| !c.feasible).map(|s2| (g, s2)))
            .unwrap_or((0, 0));
        return Err(Error::Structural(format!(
            "strongly_degraded_check failed: V at s2={s2} is not degraded from W at grid point {g}"
        )));
    }
    if best_eavesdropper_check(avwc)?.is_none() {
        return Err(Error::Structural("best_eavesdropper_check found no best eavesdropper state".into()));
    }
    let w1: Vec<Channel> = (0..s1_count).map(|s1| avwc.legit()[s1 * s2_count].clone()).collect();
    let v2: Vec<Channel> = (0..s2_count).map(|s2| avwc.eaves()[s2].clone()).collect();
    let mut prep = prepare_hull(&w1, &v2, 1, opts)?;
    let (outcomes, best) = run(&prep.engine, direct_starts(&prep.engine, opts), true, opts);
    // report indices in the full state set
    prep.legit_first.iter_mut().for_each(|s1| *s1 *= s2_count);
    prep.legit_total = avwc.states();
    finish(&prep, &outcomes, best, avwc.input_size())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: f64) -> f64 {
        crate::prob::entropy_of(&[p, 1.0 - p])
    }

    fn useless(a: usize, c: usize) -> Channel {
        Channel::constant(a, &Distribution::uniform(c))
    }

    #[test]
    fn inner_objective_examples() {
        let b = Budget::default();
        let spec = AvwcSpec::single(Channel::identity(2), useless(2, 2)).unwrap();
        let q = Distribution::point(1, 0);
        let c = InputStructure::constant(1, 2).unwrap();
        assert_eq!(inner_objective(&spec, &c, &q, &b).unwrap(), 0.0);
        let x = InputStructure::direct(1, 2, Distribution::uniform(2)).unwrap();
        assert!((inner_objective(&spec, &x, &q, &b).unwrap() - 1.0).abs() < 1e-12);
        let same = AvwcSpec::new(
            vec![Channel::bsc(0.1), Channel::bsc(0.3)],
            vec![Channel::bsc(0.1), Channel::bsc(0.3)],
        )
        .unwrap();
        assert!(inner_objective(&same, &x, &Distribution::uniform(2), &b).unwrap() <= 1e-12);
    }

    #[test]
    fn min_over_compound_examples() {
        let opts = CapacityOptions::default();
        let spec = AvwcSpec::new(vec![Channel::bsc(0.0), Channel::bsc(0.5)], vec![useless(2, 2); 2]).unwrap();
        let x = InputStructure::direct(1, 2, Distribution::uniform(2)).unwrap();
        let (q, v, heuristic) = min_over_compound(&spec, &x, &opts).unwrap();
        assert!(v.abs() < 1e-7 && q.get(1) > 1.0 - 1e-6 && !heuristic);

        let one = AvwcSpec::single(Channel::bsc(0.1), useless(2, 2)).unwrap();
        let (q, v, _) = min_over_compound(&one, &x, &opts).unwrap();
        assert_eq!(q.probs(), &[1.0]);
        assert!((v - (1.0 - h(0.1))).abs() < 1e-12);

        let twins = AvwcSpec::new(vec![Channel::bsc(0.2); 2], vec![useless(2, 2); 2]).unwrap();
        assert!((min_over_compound(&twins, &x, &opts).unwrap().1 - (1.0 - h(0.2))).abs() < 1e-12);

        // interior minimiser: mixing two Z-type channels
        let z1 = Channel::binary(0.0, 0.6);
        let z2 = Channel::binary(0.6, 0.0);
        let mixed = AvwcSpec::new(vec![z1, z2], vec![useless(2, 2); 2]).unwrap();
        let (q, v, _) = min_over_compound(&mixed, &x, &opts).unwrap();
        assert!((q.get(0) - 0.5).abs() < 1e-3);
        assert!((v - (1.0 - h(0.3))).abs() < 1e-7);
    }

    #[test]
    fn bsc_wiretap_value() {
        let spec = AvwcSpec::single(Channel::bsc(0.1), Channel::bsc(0.2)).unwrap();
        let want = h(0.2) - h(0.1);
        let opts = CapacityOptions::default();
        let e = evaluate_rsk(&spec, 1, &opts).unwrap();
        assert!((e.value_bits_per_letter - want).abs() < 2e-3, "{}", e.value_bits_per_letter);
        let d = evaluate_rs_dagger(&spec.as_cavwc(), &opts).unwrap();
        assert!((d.value_bits_per_letter - want).abs() < 2e-3);
        let grid = vec![Distribution::point(1, 0)];
        let c = evaluate_single_letter_degraded(&spec, 1, 1, &grid, &opts).unwrap();
        assert!((c.value_bits_per_letter - want).abs() < 2e-3);
    }

    #[test]
    fn soundness_on_reevaluation() {
        let spec = AvwcSpec::new(
            vec![Channel::bsc(0.05), Channel::binary(0.1, 0.3)],
            vec![Channel::bsc(0.3), Channel::binary(0.4, 0.2)],
        )
        .unwrap();
        for k in [1, 2] {
            let e = evaluate_rsk(&spec, k, &CapacityOptions { restarts: 6, ..Default::default() }).unwrap();
            let again = inner_objective(&spec, &e.argmax, &e.worst_q, &Budget::default()).unwrap();
            assert!((again / k as f64 - e.value_bits_per_letter).abs() < 1e-9, "k={k}");
            assert_eq!(e.worst_s_k.len(), k);
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let spec = AvwcSpec::single(Channel::bsc(0.2), Channel::bsc(0.1)).unwrap();
        let err = evaluate_single_letter_degraded(&spec, 1, 1, &[Distribution::point(1, 0)], &CapacityOptions::default());
        assert!(matches!(err, Err(Error::Structural(m)) if m.contains("strongly_degraded_check")));
        assert!(evaluate_rsk(&spec, 0, &CapacityOptions::default()).is_err());
        let tight = CapacityOptions { budget: Budget::new(1e4).unwrap(), ..Default::default() };
        assert!(matches!(evaluate_rsk(&spec, 3, &tight), Err(Error::Budget { .. })));
    }

    #[test]
    fn useless_legit_in_compound_list_gives_zero() {
        let c = CavwcSpec::new(vec![Channel::bsc(0.0), useless(2, 2)], vec![Channel::bsc(0.3)]).unwrap();
        let e = evaluate_rs_dagger(&c, &CapacityOptions::default()).unwrap();
        assert_eq!(e.value_bits_per_letter, 0.0);
    }
}
