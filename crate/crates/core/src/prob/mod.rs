//! Finite-alphabet probability: distributions, stochastic matrices, exact
//! information measures, types, typical sets and concentration bounds.
//!
//! Conventions: `0 log 0 = 0`, logarithms base 2, total variation unhalved.

mod bounds;
mod typical;

pub use bounds::{
    chernoff_bound, exact_type_count, f1_bound, f2_bound, mi_continuity_modulus,
    type_count_bound, typicality_tail_bound,
};
pub(crate) use typical::cond_typical_unchecked;
pub use typical::{
    is_cond_typical, is_typical, type_of, typical_set, typical_set_nonempty, TypicalityParams,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const SUM_TOL: f64 = 1e-9;

/// A probability vector on `{0, .., len-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

fn check_probs(probs: &[f64]) -> std::result::Result<(), String> {
    if probs.is_empty() {
        return Err("empty alphabet".into());
    }
    if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
        return Err(format!("entry {i} is {p}"));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(format!("entries sum to {s}"));
    }
    Ok(())
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs).map_err(Error::InvalidDistribution)?;
        Ok(Self { probs })
    }

    /// Normalises a non-negative, not identically zero weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDistribution(format!("cannot normalise {weights:?}")));
        }
        Ok(Self { probs: weights.into_iter().map(|w| w / s).collect() })
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform distribution on empty alphabet");
        Self { probs: vec![1.0 / len as f64; len] }
    }

    pub fn point(len: usize, at: usize) -> Self {
        assert!(at < len, "point mass outside alphabet");
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, a: usize) -> f64 {
        self.probs[a]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(a, _)| a)
    }

    /// Product measure `P^n(x^n)`.
    pub fn product_prob(&self, seq: &[usize]) -> f64 {
        seq.iter().map(|&a| self.probs[a]).product()
    }
}

/// A stochastic matrix `W: A -> P(B)`, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for Channel {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Channel::new(rows)
    }
}

impl From<Channel> for Vec<Vec<f64>> {
    fn from(c: Channel) -> Self {
        c.rows().map(<[f64]>::to_vec).collect()
    }
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return Err(Error::InvalidChannel("no input letters".into()));
        }
        let outputs = rows[0].len();
        let mut data = Vec::with_capacity(inputs * outputs);
        for (a, row) in rows.into_iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::InvalidChannel(format!(
                    "row {a} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            check_probs(&row).map_err(|e| Error::InvalidChannel(format!("row {a}: {e}")))?;
            data.extend(row);
        }
        Ok(Self { inputs, outputs, data })
    }

    /// Builds from a flat row-major table, validating every row.
    pub fn from_flat(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != inputs * outputs || inputs == 0 || outputs == 0 {
            return Err(Error::InvalidChannel(format!(
                "{} entries for a {inputs}x{outputs} matrix",
                data.len()
            )));
        }
        for (a, row) in data.chunks(outputs).enumerate() {
            check_probs(row).map_err(|e| Error::InvalidChannel(format!("row {a}: {e}")))?;
        }
        Ok(Self { inputs, outputs, data })
    }

    /// Flat construction for tables that are stochastic by construction.
    pub(crate) fn from_flat_unchecked(inputs: usize, outputs: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), inputs * outputs);
        Self { inputs, outputs, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            data[a * n + a] = 1.0;
        }
        Self { inputs: n, outputs: n, data }
    }

    /// Every input produces the same output law.
    pub fn constant(inputs: usize, out: &Distribution) -> Self {
        let data = (0..inputs).flat_map(|_| out.probs().iter().copied()).collect();
        Self { inputs, outputs: out.len(), data }
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "crossover {p} outside [0, 1]");
        Self { inputs: 2, outputs: 2, data: vec![1.0 - p, p, p, 1.0 - p] }
    }

    /// Binary channel with `P(1|0) = p01` and `P(0|1) = p10`.
    pub fn binary(p01: f64, p10: f64) -> Self {
        Self { inputs: 2, outputs: 2, data: vec![1.0 - p01, p01, p10, 1.0 - p10] }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.outputs..(a + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.outputs)
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.outputs + b]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// `(next ∘ self)(c|a) = Σ_b next(c|b) self(b|a)`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.outputs != next.inputs {
            return Err(Error::DimensionMismatch(format!(
                "cannot feed {} outputs into a channel with {} inputs",
                self.outputs, next.inputs
            )));
        }
        Ok(Channel::from_flat_unchecked(
            self.inputs,
            next.outputs,
            matmul(&self.data, self.inputs, self.outputs, &next.data, next.outputs),
        ))
    }

    pub fn output_distribution(&self, input: &Distribution) -> Result<Distribution> {
        self.check_input(input)?;
        Ok(Distribution { probs: output_law(input.probs(), &self.data, self.outputs) })
    }

    fn check_input(&self, input: &Distribution) -> Result<()> {
        if input.len() != self.inputs {
            return Err(Error::DimensionMismatch(format!(
                "input law on {} letters, channel has {} inputs",
                input.len(),
                self.inputs
            )));
        }
        Ok(())
    }

    /// `k`-fold memoryless extension `W^k(y^k|x^k) = Π W(y_i|x_i)`.
    pub fn power(&self, k: usize) -> Result<Channel> {
        let mut out = Channel::from_flat_unchecked(1, 1, vec![1.0]);
        for _ in 0..k {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// `(W ⊗ V)((b,d)|(a,c)) = W(b|a) V(d|c)`, with the first factor most significant.
    pub fn tensor(&self, other: &Channel) -> Result<Channel> {
        let inputs = self
            .inputs
            .checked_mul(other.inputs)
            .ok_or_else(|| Error::OutOfRange("tensor input alphabet overflows".into()))?;
        let outputs = self
            .outputs
            .checked_mul(other.outputs)
            .ok_or_else(|| Error::OutOfRange("tensor output alphabet overflows".into()))?;
        let mut data = vec![0.0; inputs * outputs];
        for a in 0..self.inputs {
            for c in 0..other.inputs {
                let row = (a * other.inputs + c) * outputs;
                for b in 0..self.outputs {
                    let w = self.get(a, b);
                    if w == 0.0 {
                        continue;
                    }
                    for d in 0..other.outputs {
                        data[row + b * other.outputs + d] = w * other.get(c, d);
                    }
                }
            }
        }
        Ok(Channel::from_flat_unchecked(inputs, outputs, data))
    }
}

/// Joint law on a product alphabet `A x B`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} table",
                table.len()
            )));
        }
        check_probs(&table).map_err(Error::InvalidDistribution)?;
        Ok(Self { rows, cols, table })
    }

    /// `P_XY(x, y) = input(x) ch(y|x)`.
    pub fn from_channel(input: &Distribution, ch: &Channel) -> Result<Self> {
        ch.check_input(input)?;
        let mut table = ch.data.clone();
        for (a, row) in table.chunks_mut(ch.outputs).enumerate() {
            let p = input.get(a);
            row.iter_mut().for_each(|v| *v *= p);
        }
        Ok(Self { rows: ch.inputs, cols: ch.outputs, table })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.cols + b]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.table.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for row in self.table.chunks(self.cols) {
            for (acc, v) in m.iter_mut().zip(row) {
                *acc += v;
            }
        }
        m
    }

    /// `I(X;Y) = H(X) + H(Y) - H(X,Y)` from the table.
    pub fn mutual_information(&self) -> f64 {
        let v = entropy_of(&self.row_marginal()) + entropy_of(&self.col_marginal())
            - entropy_of(&self.table);
        v.max(0.0)
    }
}

/// `-Σ p log p` over a raw non-negative vector (not renormalised).
pub fn entropy_of(p: &[f64]) -> f64 {
    p.iter().filter(|v| **v > 0.0).map(|v| -v * v.log2()).sum()
}

pub fn entropy(p: &Distribution) -> f64 {
    entropy_of(p.probs())
}

/// `I(X;Y)` for `X ~ input` sent through `ch`.
pub fn mutual_information(input: &Distribution, ch: &Channel) -> Result<f64> {
    ch.check_input(input)?;
    Ok(mi_raw(input.probs(), ch.as_flat(), ch.outputs()))
}

/// Conditional entropy `H(Y|X)`.
pub fn conditional_entropy(input: &Distribution, ch: &Channel) -> Result<f64> {
    ch.check_input(input)?;
    Ok(input.probs().iter().zip(ch.rows()).map(|(p, row)| p * entropy_of(row)).sum())
}

/// Total variation `Σ |mu(a) - nu(a)|` of two non-negative measures.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch(format!(
            "measures on {} and {} letters",
            mu.len(),
            nu.len()
        )));
    }
    Ok(mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum())
}

/// `Σ_u p(u) D(ch(.|u) || p ch)` in bits, the hot path behind every MI term.
pub(crate) fn mi_raw(p: &[f64], ch: &[f64], outputs: usize) -> f64 {
    let py = output_law(p, ch, outputs);
    let mut acc = 0.0;
    for (pu, row) in p.iter().zip(ch.chunks(outputs)) {
        if *pu <= 0.0 {
            continue;
        }
        let mut d = 0.0;
        for (g, q) in row.iter().zip(&py) {
            if *g > 0.0 {
                d += g * (g / q).log2();
            }
        }
        acc += pu * d;
    }
    acc.max(0.0)
}

pub(crate) fn output_law(p: &[f64], ch: &[f64], outputs: usize) -> Vec<f64> {
    let mut py = vec![0.0; outputs];
    for (pu, row) in p.iter().zip(ch.chunks(outputs)) {
        if *pu == 0.0 {
            continue;
        }
        for (acc, g) in py.iter_mut().zip(row) {
            *acc += pu * g;
        }
    }
    py
}

/// Row-major `(r x k) * (k x c)`.
pub(crate) fn matmul(a: &[f64], r: usize, k: usize, b: &[f64], c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        let orow = &mut out[i * c..(i + 1) * c];
        for m in 0..k {
            let v = a[i * k + m];
            if v == 0.0 {
                continue;
            }
            for (o, w) in orow.iter_mut().zip(&b[m * c..(m + 1) * c]) {
                *o += v * w;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert!(close(entropy(&Distribution::uniform(2)), 1.0, 1e-15));
        assert_eq!(entropy(&Distribution::point(3, 1)), 0.0);
        // -0.9 log 0.9 - 0.1 log 0.1
        let h = entropy(&Distribution::new(vec![0.9, 0.1]).unwrap());
        assert!(close(h, 0.468996, 1e-6), "{h}");
    }

    #[test]
    fn mutual_information_examples() {
        let u = Distribution::uniform(2);
        assert!(close(mutual_information(&u, &Channel::identity(2)).unwrap(), 1.0, 1e-15));
        let useless = Channel::constant(2, &Distribution::new(vec![0.3, 0.7]).unwrap());
        let p = Distribution::new(vec![0.2, 0.8]).unwrap();
        assert_eq!(mutual_information(&p, &useless).unwrap(), 0.0);
        // 1 - h(0.1)
        let mi = mutual_information(&u, &Channel::bsc(0.1)).unwrap();
        assert!(close(mi, 0.531004, 1e-6), "{mi}");
    }

    #[test]
    fn mutual_information_rejects_mismatch() {
        assert!(mutual_information(&Distribution::uniform(3), &Channel::bsc(0.1)).is_err());
    }

    #[test]
    fn mi_matches_joint_table() {
        let p = Distribution::new(vec![0.3, 0.7]).unwrap();
        let ch = Channel::new(vec![vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]]).unwrap();
        let joint = JointDistribution::from_channel(&p, &ch).unwrap();
        let direct = mutual_information(&p, &ch).unwrap();
        assert!(close(joint.mutual_information(), direct, 1e-12));
        let hy = entropy_of(&joint.col_marginal());
        let hyx = conditional_entropy(&p, &ch).unwrap();
        assert!(close(direct, hy - hyx, 1e-12));
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert!(close(tv_distance(&[0.7, 0.3], &[0.5, 0.5]).unwrap(), 0.4, 1e-15));
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Channel::new(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(Channel::new(vec![vec![0.5, 0.4]]).is_err());
    }

    #[test]
    fn power_is_product() {
        let w = Channel::bsc(0.1);
        let w2 = w.power(2).unwrap();
        // x = 00 -> y = 01
        assert!(close(w2.get(0, 1), 0.9 * 0.1, 1e-15));
        assert_eq!(w2.inputs(), 4);
        assert!(w.power(0).unwrap().get(0, 0) == 1.0);
    }

    #[test]
    fn composition_of_bscs() {
        let c = Channel::bsc(0.1).then(&Channel::bsc(0.125)).unwrap();
        assert!(close(c.get(0, 1), 0.2, 1e-15));
    }
}
