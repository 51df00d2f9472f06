//! Oracles shared by the integration suites. Written against plain vectors so
//! they do not route through the library's own information measures.
#![allow(dead_code)]

use avwc_core::code::Code;
use avwc_core::{seq, Channel};

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|x| **x > 0.0).map(|x| -x * x.log2()).sum()
}

/// Mutual information of a joint table `p[i][j]`.
pub fn joint_mi(joint: &[Vec<f64>]) -> f64 {
    let cols = joint[0].len();
    let pr: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let pc: Vec<f64> = (0..cols).map(|c| joint.iter().map(|r| r[c]).sum()).collect();
    entropy(&pr) + entropy(&pc) - entropy(&joint.concat())
}

pub fn mi(input: &[f64], w: &[Vec<f64>]) -> f64 {
    let joint: Vec<Vec<f64>> = input.iter().zip(w).map(|(p, r)| r.iter().map(|v| p * v).collect()).collect();
    joint_mi(&joint)
}

/// Blahut-Arimoto capacity of `w`, stopped on the standard upper/lower gap.
pub fn blahut_arimoto(w: &[Vec<f64>]) -> f64 {
    let (a, b) = (w.len(), w[0].len());
    let mut p = vec![1.0 / a as f64; a];
    let mut cap = 0.0;
    for _ in 0..20000 {
        let q: Vec<f64> = (0..b).map(|y| (0..a).map(|x| p[x] * w[x][y]).sum()).collect();
        let d: Vec<f64> = (0..a)
            .map(|x| (0..b).filter(|&y| w[x][y] > 0.0).map(|y| w[x][y] * (w[x][y] / q[y]).log2()).sum())
            .collect();
        let lower: f64 = (0..a).map(|x| p[x] * d[x]).sum();
        let upper = d.iter().cloned().fold(f64::MIN, f64::max);
        cap = lower;
        if upper - lower < 1e-9 {
            break;
        }
        let z: f64 = (0..a).map(|x| p[x] * d[x].exp2()).sum();
        p = (0..a).map(|x| p[x] * d[x].exp2() / z).collect();
    }
    cap
}

pub fn rows(c: &Channel) -> Vec<Vec<f64>> {
    c.rows().map(|r| r.to_vec()).collect()
}

/// `(j, z)` table of a code with uniform `(j, l)`, built letter by letter.
pub fn message_output_joint<C: Code + ?Sized>(code: &C, eaves: &[Channel], s: &[usize]) -> Vec<Vec<f64>> {
    let n = code.n();
    let c = eaves[0].outputs();
    let (jn, ln) = (code.messages(), code.randomness());
    let zs: Vec<Vec<usize>> = seq::all(c, n).unwrap().collect();
    let mut joint = vec![vec![0.0; zs.len()]; jn];
    for (j, row) in joint.iter_mut().enumerate() {
        for l in 0..ln {
            let x = code.word(j, l);
            for (zi, z) in zs.iter().enumerate() {
                let mut p = 1.0 / (jn * ln) as f64;
                for i in 0..n {
                    p *= eaves[s[i]].get(x[i], z[i]);
                }
                row[zi] += p;
            }
        }
    }
    joint
}
