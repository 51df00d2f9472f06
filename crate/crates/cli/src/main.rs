//! `avwc`: batch front-end over `avwc-core`.
//!
//! Every subcommand loads a channel spec, calls one library operation and
//! writes its result as CSV or JSON to `--out` (or standard output), with a
//! one-line summary on the other stream.

mod args;
mod output;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::process::ExitCode;

use avwc_core::capacity::{
    continuity_probe, evaluate_rs_dagger, evaluate_rsk, evaluate_single_letter_degraded, CapacityEstimate,
};
use avwc_core::channel::{best_eavesdropper_check, hausdorff_distance, strongly_degraded_check, SpecDocument};
use avwc_core::code::{
    average_error, compound_states, error_monte_carlo, read_codebook_csv, sample_codebook, secrecy_audit,
    write_audit_csv, write_codebook_csv, Code, ThetaMode,
};
use avwc_core::robust::{correlated_error, robustify, rt_check, success_table, CorrelatedManifest};
use avwc_core::{seq, Budget, CapacityOptions, Codebook, CodeParams, Distribution, WiretapCode};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use args::{Cli, CodeArgs, Command, Mode, OptimArgs};
use output::{csv_number, Artifact};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn capacity_options(o: &OptimArgs, cli: &Cli, budget: Budget) -> CapacityOptions {
    CapacityOptions {
        restarts: o.restarts,
        max_iters: o.max_iters,
        seed: cli.seed,
        u_cap: o.u_cap,
        budget,
        ..CapacityOptions::default()
    }
}

fn estimate_artifact(est: &CapacityEstimate, json: bool) -> CliResult<Artifact> {
    Ok(if json {
        Artifact::json(est)?
    } else {
        Artifact::Csv(format!("{}\n{}\n", CapacityEstimate::CSV_HEADER, est.csv_row()))
    })
}

fn wants_json(cli: &Cli) -> bool {
    cli.out.as_deref().and_then(Path::extension).is_some_and(|e| e == "json")
}

fn load_spec(path: &Path) -> CliResult<SpecDocument> {
    SpecDocument::load(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// The code under test: read from `--code`, or sampled from `--seed`.
fn load_code(c: &CodeArgs, doc: &SpecDocument, seed: u64) -> CliResult<WiretapCode> {
    let cavwc = doc.cavwc();
    let a = cavwc.input_size();
    let input = match &c.input {
        Some(w) => Distribution::from_weights(w.clone())?,
        None => Distribution::uniform(a),
    };
    let compound = cavwc.compound().to_vec();
    if let Some(path) = &c.code {
        let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let (j, l, words) = read_codebook_csv(BufReader::new(file))?;
        let n = words.first().map_or(0, Vec::len);
        let params = CodeParams::new(n, c.tau, c.delta, c.alpha, j, l, input)?;
        return Ok(WiretapCode::new(Codebook::from_words(params, words)?, compound)?);
    }
    let n = c.n.ok_or("either --code or --n is required")?;
    let mut params = CodeParams::derived(&cavwc, input, n, c.tau, c.delta, c.alpha)?;
    if let Some(j) = c.j {
        params.j = j;
    }
    if let Some(l) = c.l {
        params.l = l;
    }
    let params = CodeParams::new(n, c.tau, c.delta, c.alpha, params.j, params.l, params.input_dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(WiretapCode::new(sample_codebook(&params, &mut rng)?, compound)?)
}

/// All of `S^n`, or `sample` seeded draws from it.
fn state_sequences(states: usize, n: usize, sample: Option<usize>, seed: u64, budget: &Budget) -> CliResult<Vec<Vec<usize>>> {
    Ok(match sample {
        Some(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m).map(|_| (0..n).map(|_| rng.random_range(0..states)).collect()).collect()
        }
        None => {
            budget.check("enumerating S^n", seq::count(states, n)? as f64)?;
            seq::all(states, n)?.collect()
        }
    })
}

fn run(cli: &Cli) -> CliResult<()> {
    let budget = match cli.budget {
        Some(b) => Budget::new(b)?,
        None => Budget::from_env()?,
    };
    let (artifact, summary) = match &cli.command {
        Command::Capacity { spec, k, optim } => {
            let doc = load_spec(spec)?;
            let est = evaluate_rsk(&doc.avwc, *k, &capacity_options(optim, cli, budget))?;
            let s = format!("R_{k} = {} bits/letter", csv_number(est.value_bits_per_letter));
            (estimate_artifact(&est, wants_json(cli))?, s)
        }
        Command::Dagger { spec, optim } => {
            let doc = load_spec(spec)?;
            let est = evaluate_rs_dagger(&doc.cavwc(), &capacity_options(optim, cli, budget))?;
            let s = format!("R_dagger = {} bits/letter", csv_number(est.value_bits_per_letter));
            (estimate_artifact(&est, wants_json(cli))?, s)
        }
        Command::Degraded { spec, s1, s2, grid, optim } => {
            let doc = load_spec(spec)?;
            let q1_grid: Vec<Distribution> = if *s1 == 1 {
                vec![Distribution::point(1, 0)]
            } else {
                seq::compositions(*grid, *s1)
                    .into_iter()
                    .map(|c| Distribution::new(c.iter().map(|x| *x as f64 / *grid as f64).collect()))
                    .collect::<Result<_, _>>()?
            };
            let strong = strongly_degraded_check(&doc.avwc, *s1, *s2, &q1_grid)?;
            let best = best_eavesdropper_check(&doc.avwc)?;
            let value = if strong.holds && best.is_some() {
                let o = capacity_options(optim, cli, budget);
                Some(evaluate_single_letter_degraded(&doc.avwc, *s1, *s2, &q1_grid, &o)?.value_bits_per_letter)
            } else {
                None
            };
            let max_residual = strong.witnesses.iter().flatten().map(|c| c.residual).fold(0.0, f64::max);
            let s = match value {
                Some(v) => format!("strongly degraded with best eavesdropper state {}; R = {}", best.unwrap(), csv_number(v)),
                None => format!("preconditions fail (strongly degraded: {}, best eavesdropper: {best:?})", strong.holds),
            };
            let art = Artifact::Json(json!({
                "strongly_degraded": strong.holds,
                "max_residual": max_residual,
                "best_eavesdropper": best,
                "value_bits_per_letter": value,
            }));
            (art, s)
        }
        Command::BestEaves { spec } => {
            let doc = load_spec(spec)?;
            let best = best_eavesdropper_check(&doc.avwc)?;
            let name = best.map(|s| doc.names[s].clone());
            let s = match &name {
                Some(n) => format!("best eavesdropper state: {n}"),
                None => "no best eavesdropper state".to_string(),
            };
            (Artifact::Json(json!({ "best_state": best, "name": name })), s)
        }
        Command::Hausdorff { spec, other } => {
            let (a, b) = (load_spec(spec)?, load_spec(other)?);
            let d = hausdorff_distance(&a.avwc, &b.avwc)?;
            (Artifact::Json(json!({ "distance": d })), format!("d = {}", csv_number(d)))
        }
        Command::Continuity { spec, radii, k, trials, optim } => {
            let doc = load_spec(spec)?;
            let rep = continuity_probe(&doc.avwc, radii, *k, *trials, &capacity_options(optim, cli, budget))?;
            let mut csv = String::from("radius,trial,distance,delta\n");
            for r in &rep.rows {
                csv += &format!("{},{},{},{}\n", csv_number(r.radius), r.trial, csv_number(r.distance), csv_number(r.delta));
            }
            let worst: Vec<String> = rep.summary.iter().map(|(r, m, _)| format!("{}: {}", csv_number(*r), csv_number(*m))).collect();
            (Artifact::Csv(csv), format!("base R_{k} = {}; max |dR| by radius {}", csv_number(rep.base_value), worst.join(", ")))
        }
        Command::Simulate { spec, code, trials } => {
            let doc = load_spec(spec)?;
            let wc = load_code(code, &doc, cli.seed)?;
            let compound = doc.cavwc().compound().to_vec();
            let states = compound_states(compound.len(), wc.n());
            let exact = average_error(&wc, &compound, &states, &budget)?;
            let mut s = format!(
                "n = {}, J = {}, L = {}; exact message error {} (full {})",
                wc.n(),
                wc.messages(),
                wc.randomness(),
                csv_number(exact.message_error),
                csv_number(exact.full_error)
            );
            if let Some(t) = trials {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.wrapping_add(1));
                let mc = error_monte_carlo(&wc, &compound, &states[exact.worst], *t, &mut rng)?;
                s += &format!("; Monte Carlo {} +- {}", csv_number(mc.message_error), csv_number(mc.message_sigma));
            }
            let mut buf = Vec::new();
            write_codebook_csv(&mut buf, &wc.codebook)?;
            (Artifact::Csv(String::from_utf8(buf)?), s)
        }
        Command::Audit { spec, code, mode, trials, sample } => {
            let doc = load_spec(spec)?;
            let wc = load_code(code, &doc, cli.seed)?;
            let states = state_sequences(doc.avwc.states(), wc.n(), *sample, cli.seed, &budget)?;
            let theta_mode = match mode {
                Mode::Exact => ThetaMode::Exact,
                Mode::Mc => ThetaMode::MonteCarlo { samples: *trials, seed: cli.seed },
            };
            let audit = secrecy_audit(&wc, doc.avwc.legit(), doc.avwc.eaves(), &states, theta_mode, &budget)?;
            let mut buf = Vec::new();
            write_audit_csv(&mut buf, &audit, doc.avwc.states())?;
            let s = format!(
                "{} state sequences; max leakage {} bits, max TV {}, small-n flag rate {}",
                audit.rows.len(),
                csv_number(audit.max_leakage),
                csv_number(audit.max_tv),
                csv_number(audit.flag_rate)
            );
            (Artifact::Csv(String::from_utf8(buf)?), s)
        }
        Command::Robustify { spec, code, m, full } => {
            let doc = load_spec(spec)?;
            let wc = load_code(code, &doc, cli.seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.wrapping_add(1));
            let cc = robustify(&wc, *m, *full, &mut rng)?;
            let base = match (&code.code, &cli.out) {
                (Some(p), _) => p.display().to_string(),
                (None, Some(out)) => {
                    let path = out.with_extension("codebook.csv");
                    write_codebook_csv(File::create(&path)?, &wc.codebook)?;
                    path.display().to_string()
                }
                (None, None) => return Err("robustify without --code needs --out to store the base codebook".into()),
            };
            let manifest = CorrelatedManifest::from_code(&cc, base, spec.display().to_string());
            let states = state_sequences(doc.avwc.states(), wc.n(), None, cli.seed, &budget)?;
            let err = correlated_error(&cc, doc.avwc.legit(), &states, &budget)?;
            let s = format!(
                "{} permutations{}; worst correlated error over S^n {}",
                cc.perms.len(),
                if *full { " (full group)" } else { " (sampled, empirical)" },
                csv_number(err.value)
            );
            (Artifact::Text(manifest.to_json_string()?), s)
        }
        Command::RtCheck { spec, code, eps } => {
            let doc = load_spec(spec)?;
            let wc = load_code(code, &doc, cli.seed)?;
            let f = success_table(&wc, doc.avwc.legit(), &budget)?;
            let rep = rt_check(&f, wc.n(), doc.avwc.states(), *eps)?;
            let s = match rep.conclusion_holds {
                Some(c) => format!(
                    "hypothesis holds at eps = {}; conclusion {} (min average {} vs bound {})",
                    csv_number(rep.eps),
                    if c { "holds" } else { "FAILS" },
                    csv_number(rep.conclusion_min),
                    csv_number(rep.bound)
                ),
                None => format!("hypothesis fails at eps = {} (min {})", csv_number(rep.eps), csv_number(rep.hypothesis_min)),
            };
            (Artifact::json(&rep)?, s)
        }
    };
    match &cli.out {
        Some(path) => {
            artifact.write_to(File::create(path)?)?;
            println!("{summary}");
        }
        None => {
            artifact.write_to(std::io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}
