use serde::{Deserialize, Serialize};

use super::{Channel, Distribution};
use crate::error::{Error, Result};
use crate::seq;

/// Blocklength and typicality slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub n: usize,
    pub delta: f64,
}

impl TypicalityParams {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::OutOfRange(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { n, delta })
    }
}

/// Empirical distribution `N(a|x^n)/n`.
pub fn type_of(x: &[usize], alphabet: usize) -> Result<Distribution> {
    if x.is_empty() {
        return Err(Error::OutOfRange("type of an empty sequence".into()));
    }
    if let Some(a) = x.iter().find(|a| **a >= alphabet) {
        return Err(Error::DimensionMismatch(format!("letter {a} outside alphabet of size {alphabet}")));
    }
    let n = x.len() as f64;
    Distribution::new(seq::counts(x, alphabet).into_iter().map(|c| c as f64 / n).collect())
}

fn counts_typical(counts: &[usize], n: usize, p: &Distribution, delta: f64) -> bool {
    let n = n as f64;
    counts.iter().zip(p.probs()).all(|(&c, &pa)| {
        (c as f64 / n - pa).abs() < delta && (pa > 0.0 || c == 0)
    })
}

/// Membership in `T^n_{X,δ}`: every letter frequency within `δ` of `p`, and
/// no letter outside the support of `p`.
pub fn is_typical(x: &[usize], p: &Distribution, delta: f64) -> bool {
    if x.is_empty() || x.iter().any(|a| *a >= p.len()) {
        return false;
    }
    counts_typical(&seq::counts(x, p.len()), x.len(), p, delta)
}

/// Membership of `y^n` in `T^n_{Y|X,δ}(x^n)` for `P_{Y|X} = ch`:
/// `|N(a,b)/n - ch(b|a) N(a)/n| < δ` for all `(a, b)` and `N(a,b) = 0`
/// whenever `ch(b|a) = 0`.
pub fn is_cond_typical(y: &[usize], x: &[usize], ch: &Channel, delta: f64) -> Result<bool> {
    if y.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequences of length {} and {}",
            y.len(),
            x.len()
        )));
    }
    let (na, nb) = (ch.inputs(), ch.outputs());
    if x.iter().any(|a| *a >= na) || y.iter().any(|b| *b >= nb) {
        return Err(Error::DimensionMismatch("letter outside channel alphabet".into()));
    }
    Ok(cond_typical_unchecked(y, x, ch, delta))
}

pub(crate) fn cond_typical_unchecked(y: &[usize], x: &[usize], ch: &Channel, delta: f64) -> bool {
    let (na, nb) = (ch.inputs(), ch.outputs());
    let n = x.len() as f64;
    let mut joint = vec![0usize; na * nb];
    let mut single = vec![0usize; na];
    for (&a, &b) in x.iter().zip(y) {
        joint[a * nb + b] += 1;
        single[a] += 1;
    }
    for a in 0..na {
        let fa = single[a] as f64 / n;
        for b in 0..nb {
            let w = ch.get(a, b);
            let c = joint[a * nb + b];
            if w == 0.0 && c > 0 {
                return false;
            }
            if (c as f64 / n - w * fa).abs() >= delta {
                return false;
            }
        }
    }
    true
}

/// Whether `T^n_{X,δ}` has at least one element.
pub fn typical_set_nonempty(n: usize, p: &Distribution, delta: f64) -> bool {
    n > 0 && seq::compositions(n, p.len()).iter().any(|c| counts_typical(c, n, p, delta))
}

/// Every element of `T^n_{X,δ}`, grouped by type in lexicographic type order.
pub fn typical_set(n: usize, p: &Distribution, delta: f64) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    seq::compositions(n, p.len())
        .into_iter()
        .filter(|c| counts_typical(c, n, p, delta))
        .flat_map(|c| seq::type_class(&c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_examples() {
        assert_eq!(type_of(&[0, 0, 1, 1], 2).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(type_of(&[2, 2, 2], 3).unwrap().probs(), &[0.0, 0.0, 1.0]);
        let t = type_of(&[0, 1, 1], 2).unwrap();
        assert!((t.get(0) - 1.0 / 3.0).abs() < 1e-15 && (t.get(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!(type_of(&[], 2).is_err());
    }

    #[test]
    fn typical_examples() {
        let p = Distribution::uniform(2);
        assert!(is_typical(&[0, 1, 1, 0], &p, 1e-6));
        let q = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!(!is_typical(&[0, 0, 1], &q, 10.0));
        // seven zeros out of ten: |0.7 - 0.5| = 0.2 >= 0.1
        let x = [0, 0, 0, 0, 0, 0, 0, 1, 1, 1];
        assert!(!is_typical(&x, &p, 0.1));
    }

    #[test]
    fn cond_typical_examples() {
        let id = Channel::identity(3);
        assert!(is_cond_typical(&[0, 2, 1], &[0, 2, 1], &id, 0.01).unwrap());
        assert!(!is_cond_typical(&[0, 2, 0], &[0, 2, 1], &id, 10.0).unwrap());
        // |1/4 - 0.25| = 0 and |3/4 - 0.75| = 0
        let w = Channel::bsc(0.25);
        assert!(is_cond_typical(&[0, 0, 0, 1], &[0, 0, 0, 0], &w, 0.1).unwrap());
        assert!(is_cond_typical(&[0, 1], &[0, 0, 0], &w, 0.1).is_err());
    }

    #[test]
    fn typical_set_enumeration_matches_membership() {
        let p = Distribution::new(vec![0.3, 0.7]).unwrap();
        let set = typical_set(8, &p, 0.1);
        let brute: Vec<_> = seq::all(2, 8).unwrap().filter(|x| is_typical(x, &p, 0.1)).collect();
        assert_eq!(set.len(), brute.len());
        assert!(set.iter().all(|x| is_typical(x, &p, 0.1)));
        assert!(!typical_set_nonempty(3, &Distribution::uniform(2), 0.1));
        assert!(typical_set_nonempty(4, &Distribution::uniform(2), 0.1));
    }
}
