//! Mixed-radix indexing of sequences over a finite alphabet.
//!
//! Sequence `x^n` over an alphabet of size `m` is identified with the integer
//! `x_1 m^{n-1} + ... + x_n`, so the first letter is the most significant
//! digit. Every exhaustive table in the crate uses this ordering.

use crate::error::{Error, Result};

/// `base^len` as `usize`, or an error when it does not fit.
pub fn count(base: usize, len: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..len {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| Error::OutOfRange(format!("{base}^{len} overflows")))?;
    }
    Ok(acc)
}

pub fn index(seq: &[usize], base: usize) -> usize {
    seq.iter().fold(0, |acc, &s| acc * base + s)
}

pub fn decode(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

/// Iterator over all sequences of length `len`, in index order.
pub fn all(base: usize, len: usize) -> Result<impl Iterator<Item = Vec<usize>>> {
    let total = count(base, len)?;
    Ok((0..total).map(move |i| decode(i, base, len)))
}

/// Letter counts `N(a|x^n)`.
pub fn counts(seq: &[usize], base: usize) -> Vec<usize> {
    let mut c = vec![0; base];
    for &s in seq {
        c[s] += 1;
    }
    c
}

/// All compositions of `n` into `parts` non-negative parts (the count vectors
/// of the types of length-`n` sequences), in lexicographic order.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=left {
            cur.push(first);
            rec(left - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// The lexicographically smallest sequence with the given letter counts.
pub fn representative(counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
        .collect()
}

/// All sequences with exactly the given letter counts (one type class).
pub fn type_class(counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(left: &mut [usize], cur: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for a in 0..left.len() {
            if left[a] > 0 {
                left[a] -= 1;
                cur.push(a);
                rec(left, cur, len, out);
                cur.pop();
                left[a] += 1;
            }
        }
    }
    let len = counts.iter().sum();
    let mut left = counts.to_vec();
    let mut out = Vec::new();
    rec(&mut left, &mut Vec::with_capacity(len), len, &mut out);
    out
}
