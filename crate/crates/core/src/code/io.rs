use std::io::{Read, Write};

use super::secrecy::SecrecyAudit;
use super::Codebook;
use crate::error::{Error, Result};

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

pub(crate) fn word_to_string(w: &[usize], alphabet: usize) -> String {
    if alphabet <= 10 {
        w.iter().map(|d| char::from_digit(*d as u32, 10).expect("digit")).collect()
    } else {
        w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
    }
}

pub(crate) fn word_from_str(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::SpecFile(format!("cannot parse word '{s}'"));
    if s.contains('.') {
        s.split('.').map(|t| t.parse().map_err(|_| bad())).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect()
    }
}

/// Columns `j,l,word`, one row per codeword in `(j, l)` order.
pub fn write_codebook_csv<W: Write>(out: W, codebook: &Codebook) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "l", "word"])?;
    let a = codebook.params.input_dist.len();
    for j in 0..codebook.params.j {
        for l in 0..codebook.params.l {
            w.write_record([j.to_string(), l.to_string(), word_to_string(codebook.word(j, l), a)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Returns `(J, L, words)` with words in `(j, l)` order.
pub fn read_codebook_csv<R: Read>(input: R) -> Result<(usize, usize, Vec<Vec<usize>>)> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::SpecFile(format!("short codebook row {rec:?}")));
        let j: usize = field(0)?.parse().map_err(|_| Error::SpecFile(format!("bad j in {rec:?}")))?;
        let l: usize = field(1)?.parse().map_err(|_| Error::SpecFile(format!("bad l in {rec:?}")))?;
        rows.push((j, l, word_from_str(field(2)?)?));
    }
    let jn = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
    let ln = rows.iter().map(|r| r.1 + 1).max().unwrap_or(0);
    if rows.len() != jn * ln {
        return Err(Error::SpecFile(format!("{} rows do not fill a {jn}x{ln} codebook", rows.len())));
    }
    let mut words = vec![None; jn * ln];
    for (j, l, w) in rows {
        if words[j * ln + l].replace(w).is_some() {
            return Err(Error::SpecFile(format!("duplicate codeword ({j}, {l})")));
        }
    }
    Ok((jn, ln, words.into_iter().map(|w| w.expect("filled")).collect()))
}

/// Columns `s_n,leakage_bits,tv_audit,error`.
pub fn write_audit_csv<W: Write>(out: W, audit: &SecrecyAudit, states: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s_n", "leakage_bits", "tv_audit", "error"])?;
    for r in &audit.rows {
        w.write_record([
            word_to_string(&r.s_n, states),
            round_sig(r.leakage_bits, 12).to_string(),
            round_sig(r.tv_audit, 12).to_string(),
            round_sig(r.error, 12).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
