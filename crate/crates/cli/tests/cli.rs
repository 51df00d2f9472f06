use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use avwc_core::capacity::evaluate_rsk;
use avwc_core::channel::SpecDocument;
use avwc_core::code::{read_codebook_csv, secrecy_audit, write_audit_csv, ThetaMode};
use avwc_core::{seq, Budget, CapacityOptions, Codebook, CodeParams, Distribution, WiretapCode};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn avwc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avwc")).args(args).env_remove("AVWC_BUDGET").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = avwc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn blahut_arimoto(w: &[Vec<f64>]) -> f64 {
    let (a, b) = (w.len(), w[0].len());
    let mut p = vec![1.0 / a as f64; a];
    let mut cap = 0.0;
    for _ in 0..20000 {
        let q: Vec<f64> = (0..b).map(|y| (0..a).map(|x| p[x] * w[x][y]).sum()).collect();
        let d: Vec<f64> = (0..a).map(|x| (0..b).map(|y| w[x][y] * (w[x][y] / q[y]).log2()).sum()).collect();
        cap = (0..a).map(|x| p[x] * d[x]).sum();
        if d.iter().cloned().fold(f64::MIN, f64::max) - cap < 1e-10 {
            break;
        }
        let z: f64 = (0..a).map(|x| p[x] * d[x].exp2()).sum();
        p = (0..a).map(|x| p[x] * d[x].exp2() / z).collect();
    }
    cap
}

#[test]
fn capacity_matches_blahut_arimoto_and_the_library() {
    let spec = data("useless_eaves.json");
    let csv = ok(&["capacity", "--spec", spec.to_str().unwrap(), "--k", "1", "--seed", "3"]);
    let value: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let w = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.8, 0.1], vec![0.3, 0.3, 0.4]];
    assert!((value - blahut_arimoto(&w)).abs() <= 1e-3);

    let doc = SpecDocument::load(&spec).unwrap();
    let est = evaluate_rsk(&doc.avwc, 1, &CapacityOptions { seed: 3, ..CapacityOptions::default() }).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), est.csv_row());
}

#[test]
fn hausdorff_of_a_file_with_itself_is_zero() {
    let spec = data("lab.json");
    let s = spec.to_str().unwrap();
    let out: serde_json::Value = serde_json::from_str(&ok(&["hausdorff", "--spec", s, "--other", s])).unwrap();
    assert_eq!(out["distance"], 0.0);
}

#[test]
fn simulate_is_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("lab.json");
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        ok(&["simulate", "--spec", spec.to_str().unwrap(), "--n", "6", "--seed", seed, "--out", out.to_str().unwrap()]);
        std::fs::read(out).unwrap()
    };
    let (a, b, c) = (run("a.csv", "7"), run("b.csv", "7"), run("c.csv", "8"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn audit_reproduces_the_library_call() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("lab.json");
    let code = dir.path().join("code.csv");
    let audit = dir.path().join("audit.csv");
    let s = spec.to_str().unwrap();
    ok(&["simulate", "--spec", s, "--n", "5", "--J", "2", "--L", "2", "--seed", "1", "--out", code.to_str().unwrap()]);
    ok(&["audit", "--spec", s, "--code", code.to_str().unwrap(), "--out", audit.to_str().unwrap()]);

    let doc = SpecDocument::load(&spec).unwrap();
    let (j, l, words) = read_codebook_csv(std::fs::File::open(&code).unwrap()).unwrap();
    let params = CodeParams::new(5, 0.1, 0.15, 0.1, j, l, Distribution::uniform(2)).unwrap();
    let wc = WiretapCode::new(Codebook::from_words(params, words).unwrap(), doc.cavwc().compound().to_vec()).unwrap();
    let states: Vec<Vec<usize>> = seq::all(2, 5).unwrap().collect();
    let a = secrecy_audit(&wc, doc.avwc.legit(), doc.avwc.eaves(), &states, ThetaMode::Exact, &Budget::default()).unwrap();
    let mut expect = Vec::new();
    write_audit_csv(&mut expect, &a, 2).unwrap();
    assert_eq!(std::fs::read(&audit).unwrap(), expect);
}

#[test]
fn robustify_writes_a_manifest_next_to_the_codebook() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("lab.json");
    let out = dir.path().join("cc.json");
    ok(&["robustify", "--spec", spec.to_str().unwrap(), "--n", "4", "--J", "2", "--L", "2", "--m", "5", "--out", out.to_str().unwrap()]);
    let m = avwc_core::robust::CorrelatedManifest::load(&out).unwrap();
    assert_eq!(m.permutations.len(), 5);
    assert_eq!(m.permutations[0], avwc_core::Permutation::identity(4));
    assert!(Path::new(&m.base_code).exists());
}

#[test]
fn rt_check_reports_json() {
    let spec = data("lab.json");
    let out: serde_json::Value =
        serde_json::from_str(&ok(&["rt-check", "--spec", spec.to_str().unwrap(), "--n", "5", "--J", "2", "--L", "1"])).unwrap();
    assert_eq!(out["hypothesis_holds"], true);
    assert_eq!(out["conclusion_holds"], true);
}

#[test]
fn contract_violations_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"A\": 2,\n  \"B\": 2,\n  \"C\": 2,\n  \"states\": [ oops ]\n}\n").unwrap();
    let out = avwc(&["capacity", "--spec", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));

    let spec = data("lab.json");
    let out = avwc(&["audit", "--spec", spec.to_str().unwrap(), "--n", "6", "--budget", "10"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    let out = avwc(&["frobnicate"]);
    assert!(!out.status.success());
}
