//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use avwc_core::capacity::{
    continuity_probe, evaluate_rs_dagger, evaluate_rsk, evaluate_single_letter_degraded, InputStructure,
};
use avwc_core::channel::{degraded_check, dirichlet_sample, mix_channel, product_channel, random_channel};
use avwc_core::code::{
    average_error, compound_states, decode_table, error_monte_carlo, leakage, sample_codebook, secrecy_audit,
    ThetaMode,
};
use avwc_core::prob::{chernoff_bound, mutual_information};
use avwc_core::robust::{perm_identity_check, rt_check, success_table};
use avwc_core::{seq, AvwcSpec, Budget, CapacityOptions, Channel, CodeParams, Distribution, Permutation, WiretapCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{blahut_arimoto, entropy as h, rows};

type Outcome = (bool, String);

fn blend(a: &Channel, wa: f64, b: &Channel) -> Channel {
    let data = a.as_flat().iter().zip(b.as_flat()).map(|(x, y)| wa * x + (1.0 - wa) * y).collect();
    Channel::from_flat(a.inputs(), a.outputs(), data).unwrap()
}

/// Binary two-state AVWC with a fairly clean legitimate side and a noisy eavesdropper.
fn binary_avwc(rng: &mut ChaCha8Rng) -> AvwcSpec {
    let flat = Channel::constant(2, &Distribution::uniform(2));
    let legit = (0..2).map(|_| blend(&Channel::identity(2), 0.75, &random_channel(2, 2, rng))).collect();
    let eaves = (0..2).map(|_| blend(&random_channel(2, 2, rng), 0.4, &flat)).collect();
    AvwcSpec::new(legit, eaves).unwrap()
}

fn opts() -> CapacityOptions {
    CapacityOptions::default()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (a, b) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let w = random_channel(a, b, &mut rng);
        let v = Channel::constant(a, &dirichlet_sample(3, &mut rng));
        let spec = AvwcSpec::single(w.clone(), v).unwrap();
        let got = evaluate_rsk(&spec, 1, &opts()).unwrap().value_bits_per_letter;
        worst = worst.max((got - blahut_arimoto(&rows(&w))).abs());
    }
    (worst <= 1e-3, format!("max |R1 - BA| = {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let exact = h(&[0.2, 0.8]) - h(&[0.1, 0.9]);
    let spec = AvwcSpec::single(Channel::bsc(0.1), Channel::bsc(0.2)).unwrap();
    let r1 = evaluate_rsk(&spec, 1, &opts()).unwrap().value_bits_per_letter;
    let rd = evaluate_rs_dagger(&spec.as_cavwc(), &opts()).unwrap().value_bits_per_letter;
    let grid = [Distribution::point(1, 0)];
    let rl = evaluate_single_letter_degraded(&spec, 1, 1, &grid, &opts()).unwrap().value_bits_per_letter;
    let ok = [r1, rd, rl].iter().all(|v| (v - 0.252932).abs() <= 2e-3 && (v - exact).abs() <= 2e-3);
    (ok, format!("R1 = {r1:.6}, dagger = {rd:.6}, degraded = {rl:.6}, closed form {exact:.6}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let (a, b) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let fam: Vec<Channel> = (0..2).map(|_| random_channel(a, b, &mut rng)).collect();
        let spec = AvwcSpec::new(fam.clone(), fam).unwrap();
        worst = worst.max(evaluate_rsk(&spec, 1, &opts()).unwrap().value_bits_per_letter.abs());
    }
    (worst <= 1e-6, format!("max |R1| = {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let o = opts();
    let mut worst = f64::INFINITY;
    let mut detail = Vec::new();
    for _ in 0..5 {
        let spec = binary_avwc(&mut rng);
        let r1 = evaluate_rsk(&spec, 1, &o).unwrap().value_bits_per_letter;
        let r2 = evaluate_rsk(&spec, 2, &o).unwrap().value_bits_per_letter;
        worst = worst.min(r2 - r1);
        detail.push(format!("{r1:.4}/{r2:.4}"));
    }
    (worst >= -2.0 * o.tol, format!("min(R2 - R1) = {worst:.2e}; R1/R2: {}", detail.join(" ")))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let (a, c, states) = (rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(2..=3));
        let k = rng.random_range(1..=2);
        let eaves: Vec<Channel> = (0..states).map(|_| random_channel(a, c, &mut rng)).collect();
        let ak = seq::count(a, k).unwrap();
        let u = rng.random_range(1..=ak);
        let s = InputStructure::new(k, a, dirichlet_sample(u, &mut rng), random_channel(u, ak, &mut rng)).unwrap();
        let q = dirichlet_sample(states, &mut rng);
        let zq = mix_channel(&eaves, &q).unwrap().power(k).unwrap();
        let mixed = mutual_information(&s.p_u, &s.p_x_given_u.then(&zq).unwrap()).unwrap();
        let vertex = seq::all(states, k)
            .unwrap()
            .map(|sk| {
                let v = product_channel(&eaves, &sk).unwrap();
                mutual_information(&s.p_u, &s.p_x_given_u.then(&v).unwrap()).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(mixed - vertex);
    }
    (worst <= 1e-9, format!("max [I(U;Z_q) - max_s I(U;Z_s)] = {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let o = opts();
    let slack = 5.0 * o.tol;
    let mut ok = true;
    let mut detail = Vec::new();
    for _ in 0..5 {
        let spec = binary_avwc(&mut rng);
        let rep = continuity_probe(&spec, &[0.1, 0.01, 0.001, 0.0], 1, 3, &o).unwrap();
        let m: Vec<f64> = rep.summary.iter().map(|r| r.1).collect();
        let dup = evaluate_rsk(&spec.with_duplicated_state(0), 1, &o).unwrap().value_bits_per_letter;
        let dup_delta = (dup - rep.base_value).abs();
        let trend = m[1] <= m[0] + 2.0 * o.tol && m[2] <= m[1] + 2.0 * o.tol;
        ok &= trend && m[3] <= slack && dup_delta <= slack;
        detail.push(format!("[{:.1e} {:.1e} {:.1e} | r0 {:.0e} dup {:.0e}]", m[0], m[1], m[2], m[3], dup_delta));
    }
    (ok, format!("max|dR1| per radius 0.1/0.01/0.001: {}", detail.join(" ")))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    let mut all_feasible = true;
    for _ in 0..50 {
        let (a, b, c) = (rng.random_range(2..=4), rng.random_range(2..=4), rng.random_range(2..=4));
        let w = random_channel(a, b, &mut rng);
        let t = random_channel(b, c, &mut rng);
        let cert = degraded_check(&w, &w.then(&t).unwrap()).unwrap();
        all_feasible &= cert.feasible;
        worst = worst.max(cert.residual);
    }
    let reverse = degraded_check(&Channel::bsc(0.2), &Channel::identity(2)).unwrap();
    (
        all_feasible && worst <= 1e-7 && !reverse.feasible,
        format!("50 pairs feasible = {all_feasible}, max residual {worst:.1e}; BSC(0.2) -> noiseless feasible = {}", reverse.feasible),
    )
}

fn lab_instance() -> (Vec<Channel>, Vec<Channel>) {
    (vec![Channel::bsc(0.05)], vec![Channel::bsc(0.35), Channel::bsc(0.45)])
}

fn lab_code(n: usize, seed: u64) -> WiretapCode {
    let (compound, _) = lab_instance();
    let p = CodeParams::new(n, 0.1, 0.15, 0.1, 2, 4, Distribution::uniform(2)).unwrap();
    let cb = sample_codebook(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    WiretapCode::new(cb, compound).unwrap()
}

fn joint_table_mi(code: &WiretapCode, eaves: &[Channel], s: &[usize]) -> f64 {
    common::joint_mi(&common::message_output_joint(code, eaves, s))
}

fn criterion_8() -> Outcome {
    let (compound, eaves) = lab_instance();
    let code = lab_code(6, 8);
    let b = Budget::default();
    let table = decode_table(&code, 2, &b).unwrap();
    let mut partition = true;
    for (i, y) in seq::all(2, 6).unwrap().enumerate() {
        let claimants: Vec<(usize, usize)> = (0..2)
            .flat_map(|j| (0..4).map(move |l| (j, l)))
            .filter(|&(j, l)| code.claims(j, l, &y))
            .collect();
        let expected = if claimants.len() == 1 { claimants[0] } else { (0, 0) };
        partition &= table[i] == expected;
    }
    let mut mi_gap = 0.0f64;
    for s in seq::all(2, 6).unwrap() {
        mi_gap = mi_gap.max((leakage(&code, &eaves, &s, &b).unwrap() - joint_table_mi(&code, &eaves, &s)).abs());
    }
    let s0 = vec![0; 6];
    let exact = average_error(&code, &compound, &[s0.clone()], &b).unwrap();
    let mc = error_monte_carlo(&code, &compound, &s0, 100_000, &mut ChaCha8Rng::seed_from_u64(88)).unwrap();
    let sigma = (exact.message_error * (1.0 - exact.message_error) / 1e5).sqrt();
    let mc_ok = (mc.message_error - exact.message_error).abs() <= 3.0 * sigma;
    (
        partition && mi_gap <= 1e-12 && mc_ok,
        format!(
            "(a) partition {partition}; (b) max |leak - joint MI| = {mi_gap:.1e}; (c) exact {:.5} vs MC {:.5} (3 sigma {:.1e})",
            exact.message_error,
            mc.message_error,
            3.0 * sigma
        ),
    )
}

fn criterion_9() -> Outcome {
    let (compound, eaves) = lab_instance();
    let b = Budget::default();
    let stats = |n: usize| {
        let code = lab_code(n, 0);
        let err = average_error(&code, &compound, &compound_states(1, n), &b).unwrap().message_error;
        let leak = seq::all(2, n).unwrap().map(|s| leakage(&code, &eaves, &s, &b).unwrap()).fold(0.0, f64::max);
        (err, leak / n as f64)
    };
    let (e4, l4) = stats(4);
    let (e10, l10) = stats(10);
    (
        e10 < e4 && l10 < l4,
        format!("error n=4 {e4:.4}, n=10 {e10:.4}; max per-letter leakage n=4 {l4:.5}, n=10 {l10:.5}"),
    )
}

fn criterion_10() -> Outcome {
    let (_, eaves) = lab_instance();
    let p = CodeParams::new(3, 0.1, 0.5, 0.1, 2, 2, Distribution::uniform(2)).unwrap();
    let cb = sample_codebook(&p, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
    let code = WiretapCode::new(cb, lab_instance().0).unwrap();
    let b = Budget::default();
    let mut worst = 0.0f64;
    for pi in Permutation::all(3).unwrap() {
        for s in seq::all(2, 3).unwrap() {
            worst = worst.max(perm_identity_check(&code, &eaves, &s, &pi, &b).unwrap().max_abs_diff);
        }
    }
    (worst <= 1e-12, format!("48 comparisons, max entrywise difference {worst:.1e}"))
}

fn criterion_11() -> Outcome {
    let family = vec![Channel::bsc(0.0002), Channel::bsc(0.001)];
    let p = CodeParams::new(6, 0.1, 0.15, 0.1, 2, 1, Distribution::uniform(2)).unwrap();
    let cb = sample_codebook(&p, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let code = WiretapCode::new(cb, family.clone()).unwrap();
    let f = success_table(&code, &family, &Budget::default()).unwrap();
    let r = rt_check(&f, 6, 2, None).unwrap();
    let ok = r.hypothesis_holds && r.type_averages.len() == 7 && r.conclusion_holds == Some(true);
    (
        ok,
        format!(
            "eps = {:.4}, bound {:.4}, min type-class average {:.4}, slack {:.4}",
            r.eps,
            r.bound,
            r.conclusion_min,
            r.conclusion_min - r.bound
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let trials = 10_000;
    let mut ok = true;
    let mut detail = Vec::new();
    for (l, ratio, eps) in [(100usize, 0.5f64, 0.2f64), (1000, 0.9, 0.1), (3000, 1.0, 0.1)] {
        // X_i = b * Bernoulli(nu / b) with b = 1
        let nu = ratio;
        let mut hits = 0usize;
        for _ in 0..trials {
            let ones = (0..l).filter(|_| rng.random::<f64>() < nu).count();
            let mean = ones as f64 / l as f64;
            if mean < (1.0 - eps) * nu || mean > (1.0 + eps) * nu {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let sigma = (freq * (1.0 - freq) / trials as f64).sqrt();
        let bound = chernoff_bound(l, nu, 1.0, eps).unwrap();
        ok &= freq <= bound + 3.0 * sigma;
        detail.push(format!("L={l}: {freq:.4} <= {bound:.4}"));
    }
    (ok, detail.join(", "))
}

fn criterion_13() -> Outcome {
    let (compound, eaves) = lab_instance();
    let code = lab_code(10, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(1313);
    let states: Vec<Vec<usize>> = (0..32).map(|_| (0..10).map(|_| rng.random_range(0..2)).collect()).collect();
    let audit = secrecy_audit(&code, &vec![compound[0].clone(); 2], &eaves, &states, ThetaMode::Exact, &Budget::default())
        .unwrap();
    let consistent = audit.rows.iter().all(|r| r.theta.bound_holds || r.theta.small_n_flag());
    let vacuous = audit.rows.iter().filter(|r| r.theta.bound_vacuous).count();
    let min_mass = audit.rows.iter().map(|r| r.theta.theta_mass).fold(f64::INFINITY, f64::min);
    (
        consistent && audit.flag_rate <= 0.5,
        format!(
            "flag rate {:.1}% over 32 sequences; min Theta mass {min_mass:.4}; lower bound vacuous on {vacuous}/32",
            100.0 * audit.flag_rate
        ),
    )
}

fn main() {
    let criteria: [(fn() -> Outcome, Option<Duration>); 13] = [
        (criterion_1, Some(Duration::from_secs(10))),
        (criterion_2, Some(Duration::from_secs(5))),
        (criterion_3, None),
        (criterion_4, Some(Duration::from_secs(300))),
        (criterion_5, None),
        (criterion_6, None),
        (criterion_7, None),
        (criterion_8, Some(Duration::from_secs(120))),
        (criterion_9, None),
        (criterion_10, None),
        (criterion_11, None),
        (criterion_12, None),
        (criterion_13, None),
    ];
    let mut failures = 0;
    for (i, (run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (mut ok, mut detail) = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > *limit {
                ok = false;
                detail += &format!("; over the {:.0?} limit", limit);
            }
        }
        println!("criterion {}: {} ({:.2?}) {}", i + 1, if ok { "PASS" } else { "FAIL" }, took, detail);
        failures += usize::from(!ok);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
