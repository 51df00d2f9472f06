//! Objective evaluation and projected-gradient optimisation on raw tables.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::dirichlet_sample;
use crate::prob::{matmul, mi_raw, output_law};

const LOG_CLAMP: f64 = 60.0;
const INNER_MAX_ITERS: usize = 4000;

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

pub(crate) fn kron(a: &[f64], ar: usize, ac: usize, b: &[f64], br: usize, bc: usize) -> Vec<f64> {
    let (r, c) = (ar * br, ac * bc);
    let mut out = vec![0.0; r * c];
    for i in 0..ar {
        for j in 0..ac {
            let x = a[i * ac + j];
            if x == 0.0 {
                continue;
            }
            for k in 0..br {
                let row = (i * br + k) * c + j * bc;
                for (o, y) in out[row..row + bc].iter_mut().zip(&b[k * bc..(k + 1) * bc]) {
                    *o = x * y;
                }
            }
        }
    }
    out
}

fn power(w: &[f64], a: usize, b: usize, k: usize) -> Vec<Vec<f64>> {
    let mut pw = vec![vec![1.0]];
    for j in 0..k {
        let next = kron(&pw[j], a.pow(j as u32), b.pow(j as u32), w, a, b);
        pw.push(next);
    }
    pw
}

/// `Λ(u,y) = p(u) log(H(y|u)/P(y))` and `D(H_u || P)`, both clamped.
fn sensitivities(p: &[f64], h: &[f64], outputs: usize) -> (Vec<f64>, Vec<f64>) {
    let py = output_law(p, h, outputs);
    let mut lambda = vec![0.0; h.len()];
    let mut div = vec![0.0; p.len()];
    for (u, row) in h.chunks(outputs).enumerate() {
        for (y, &g) in row.iter().enumerate() {
            let lr = if g <= 0.0 {
                -LOG_CLAMP
            } else if py[y] <= 0.0 {
                LOG_CLAMP
            } else {
                (g / py[y]).log2().clamp(-LOG_CLAMP, LOG_CLAMP)
            };
            lambda[u * outputs + y] = p[u] * lr;
            if g > 0.0 {
                div[u] += g * lr;
            }
        }
    }
    (lambda, div)
}

fn transpose_times(g: &[f64], u: usize, ak: usize, lambda: &[f64], out: usize) -> Vec<f64> {
    let mut m = vec![0.0; ak * out];
    for i in 0..u {
        for x in 0..ak {
            let gx = g[i * ak + x];
            if gx == 0.0 {
                continue;
            }
            for (o, l) in m[x * out..(x + 1) * out].iter_mut().zip(&lambda[i * out..(i + 1) * out]) {
                *o += gx * l;
            }
        }
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) enum Legit {
    /// Convex hull of single-letter matrices (`a x b`), used at `k` letters as `W_q^k`.
    Hull { family: Vec<Vec<f64>>, a: usize, b: usize },
    /// Finite list of `A^k x B^k` matrices.
    List { channels: Vec<Vec<f64>> },
}

pub(crate) struct Engine {
    pub k: usize,
    pub ak: usize,
    pub bk: usize,
    pub ck: usize,
    pub legit: Legit,
    pub eaves: Vec<Vec<f64>>,
    pub inner_tol: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct LegitMin {
    pub value: f64,
    /// Mixing weights for a hull, a point mass for a list.
    pub q: Vec<f64>,
    pub channel: Vec<f64>,
    pub heuristic: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Eval {
    pub legit: LegitMin,
    pub eaves: Vec<f64>,
    pub value: f64,
}

impl Eval {
    pub fn worst_eaves(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.eaves.iter().enumerate() {
            if *v > self.eaves[best] {
                best = i;
            }
        }
        best
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Effort {
    Fast,
    Careful,
}

#[derive(Clone, Debug)]
pub(crate) struct Local {
    pub p: Vec<f64>,
    pub g: Vec<f64>,
    pub eval: Eval,
    pub iterations: usize,
    pub stationarity: f64,
}

impl Engine {
    pub fn states(&self) -> usize {
        match &self.legit {
            Legit::Hull { family, .. } => family.len(),
            Legit::List { channels } => channels.len(),
        }
    }

    pub fn hull_channel(&self, q: &[f64]) -> Vec<f64> {
        let Legit::Hull { family, a, b } = &self.legit else { unreachable!() };
        let mut w = vec![0.0; a * b];
        for (ws, &qs) in family.iter().zip(q) {
            if qs != 0.0 {
                w.iter_mut().zip(ws).for_each(|(o, x)| *o += qs * x);
            }
        }
        power(&w, *a, *b, self.k).pop().unwrap()
    }

    fn legit_value(&self, p: &[f64], g: &[f64], ch: &[f64]) -> f64 {
        let h = matmul(g, p.len(), self.ak, ch, self.bk);
        mi_raw(p, &h, self.bk)
    }

    /// Gradient in `q` of `I(U;Y_q^k)` for the hull side.
    fn hull_gradient(&self, p: &[f64], g: &[f64], q: &[f64]) -> Vec<f64> {
        let Legit::Hull { family, a, b } = &self.legit else { unreachable!() };
        let (a, b, k) = (*a, *b, self.k);
        let mut w = vec![0.0; a * b];
        for (ws, &qs) in family.iter().zip(q) {
            w.iter_mut().zip(ws).for_each(|(o, x)| *o += qs * x);
        }
        let pw = power(&w, a, b, k);
        let h = matmul(g, p.len(), self.ak, &pw[k], self.bk);
        let (lambda, _) = sensitivities(p, &h, self.bk);
        let m = transpose_times(g, p.len(), self.ak, &lambda, self.bk);
        family
            .iter()
            .map(|ws| {
                (0..k)
                    .map(|i| {
                        let (ri, ci) = (a.pow(i as u32), b.pow(i as u32));
                        let left = kron(&pw[i], ri, ci, ws, a, b);
                        let rest = k - 1 - i;
                        let d = kron(&left, ri * a, ci * b, &pw[rest], a.pow(rest as u32), b.pow(rest as u32));
                        dot(&m, &d)
                    })
                    .sum()
            })
            .collect()
    }

    /// Projected-gradient descent of `q -> I(U;Y_q^k)` from `start`.
    fn descend(&self, p: &[f64], g: &[f64], start: Vec<f64>) -> (f64, Vec<f64>) {
        let mut q = start;
        let mut f = self.legit_value(p, g, &self.hull_channel(&q));
        let mut eta = 1.0;
        for _ in 0..INNER_MAX_ITERS {
            let grad = self.hull_gradient(p, g, &q);
            let min_g = grad.iter().cloned().fold(f64::INFINITY, f64::min);
            if dot(&grad, &q) - min_g <= self.inner_tol {
                break;
            }
            let mut moved = false;
            while eta > 1e-14 {
                let mut cand: Vec<f64> = q.iter().zip(&grad).map(|(x, d)| x - eta * d).collect();
                project_simplex(&mut cand);
                let fc = self.legit_value(p, g, &self.hull_channel(&cand));
                let decrease: f64 = grad.iter().zip(&q).zip(&cand).map(|((d, a), b)| d * (a - b)).sum();
                if fc < f && f - fc >= 1e-4 * decrease {
                    q = cand;
                    f = fc;
                    moved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !moved {
                break;
            }
            eta = (eta * 2.0).min(1e4);
        }
        (f, q)
    }

    fn hull_starts(&self, warm: Option<&[f64]>, effort: Effort, rng: Option<&mut ChaCha8Rng>) -> Vec<Vec<f64>> {
        let s = self.states();
        let mut starts = Vec::new();
        if let Some(w) = warm {
            starts.push(w.to_vec());
        }
        if self.k == 1 && effort == Effort::Fast {
            if starts.is_empty() {
                starts.push(vec![1.0 / s as f64; s]);
            }
            return starts;
        }
        starts.push(vec![1.0 / s as f64; s]);
        for v in 0..s {
            let mut e = vec![0.0; s];
            e[v] = 1.0;
            starts.push(e);
        }
        if let Some(rng) = rng {
            for _ in 0..3 {
                starts.push(dirichlet_sample(s, rng).probs().to_vec());
            }
        }
        starts
    }

    pub fn legit_min(
        &self,
        p: &[f64],
        g: &[f64],
        warm: Option<&[f64]>,
        effort: Effort,
        rng: Option<&mut ChaCha8Rng>,
    ) -> LegitMin {
        match &self.legit {
            Legit::List { channels } => {
                let mut best = (f64::INFINITY, 0);
                for (r, ch) in channels.iter().enumerate() {
                    let v = self.legit_value(p, g, ch);
                    if v < best.0 {
                        best = (v, r);
                    }
                }
                let mut q = vec![0.0; channels.len()];
                q[best.1] = 1.0;
                LegitMin { value: best.0, q, channel: channels[best.1].clone(), heuristic: false }
            }
            Legit::Hull { family, .. } if family.len() == 1 => {
                let channel = self.hull_channel(&[1.0]);
                LegitMin { value: self.legit_value(p, g, &channel), q: vec![1.0], channel, heuristic: false }
            }
            Legit::Hull { family, .. } => {
                let mut starts = self.hull_starts(warm, effort, rng);
                if effort == Effort::Careful && self.k >= 2 && family.len() == 2 {
                    starts.push(self.grid_min(p, g, 200).1);
                }
                let mut best = (f64::INFINITY, Vec::new());
                for st in starts {
                    let r = self.descend(p, g, st);
                    if r.0 < best.0 {
                        best = r;
                    }
                }
                let channel = self.hull_channel(&best.1);
                LegitMin { value: best.0, q: best.1, channel, heuristic: self.k >= 2 }
            }
        }
    }

    /// Minimum over `q = (1 - t, t)`, `t = i / steps`, for two-state hulls.
    pub fn grid_min(&self, p: &[f64], g: &[f64], steps: usize) -> (f64, Vec<f64>) {
        let mut best = (f64::INFINITY, Vec::new());
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let q = vec![1.0 - t, t];
            let v = self.legit_value(p, g, &self.hull_channel(&q));
            if v < best.0 {
                best = (v, q);
            }
        }
        best
    }

    pub fn eaves_values(&self, p: &[f64], g: &[f64]) -> Vec<f64> {
        self.eaves.iter().map(|v| self.legit_like(p, g, v, self.ck)).collect()
    }

    fn legit_like(&self, p: &[f64], g: &[f64], ch: &[f64], out: usize) -> f64 {
        let h = matmul(g, p.len(), self.ak, ch, out);
        mi_raw(p, &h, out)
    }

    pub fn evaluate(
        &self,
        p: &[f64],
        g: &[f64],
        warm: Option<&[f64]>,
        effort: Effort,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Eval {
        let legit = self.legit_min(p, g, warm, effort, rng);
        let eaves = self.eaves_values(p, g);
        let top = eaves.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Eval { value: legit.value - top, legit, eaves }
    }

    fn legit_gradient(&self, p: &[f64], g: &[f64], e: &Eval) -> (Vec<f64>, Vec<f64>) {
        let u = p.len();
        let h = matmul(g, u, self.ak, &e.legit.channel, self.bk);
        let (lambda, gp) = sensitivities(p, &h, self.bk);
        (gp, mul_transpose(&lambda, u, self.bk, &e.legit.channel, self.ak))
    }

    fn eaves_gradient(&self, p: &[f64], g: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let u = p.len();
        let hz = matmul(g, u, self.ak, v, self.ck);
        let (lz, dz) = sensitivities(p, &hz, self.ck);
        (dz, mul_transpose(&lz, u, self.ck, v, self.ak))
    }

    /// Candidate ascent directions: the legit envelope gradient minus a
    /// soft-max over eavesdropper gradients, minus the gradient of the
    /// largest term alone, and the minimum-norm element over gradients of
    /// nearly maximal terms (the steepest direction at a kink).
    fn directions(&self, p: &[f64], g: &[f64], e: &Eval) -> Vec<(Vec<f64>, Vec<f64>)> {
        let (lp, lg) = self.legit_gradient(p, g, e);
        let top = e.eaves.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = e.eaves.iter().map(|v| (200.0 * (v - top)).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut grads: Vec<Option<(Vec<f64>, Vec<f64>)>> = vec![None; self.eaves.len()];
        let mut soft = (lp.clone(), lg.clone());
        for (i, w) in weights.iter().enumerate() {
            let w = w / total;
            if w < 1e-12 {
                continue;
            }
            let d = self.eaves_gradient(p, g, &self.eaves[i]);
            soft.0.iter_mut().zip(&d.0).for_each(|(a, b)| *a -= w * b);
            soft.1.iter_mut().zip(&d.1).for_each(|(a, b)| *a -= w * b);
            grads[i] = Some(d);
        }
        let mut out = vec![soft];
        let mut last = 0;
        for window in [0.0, 1e-6, 1e-4] {
            let active: Vec<usize> = (0..e.eaves.len()).filter(|&i| e.eaves[i] >= top - window).collect();
            if active.len() == last || (active.len() == 1 && total < 1.0 + 1e-12) {
                continue;
            }
            last = active.len();
            let parts: Vec<Vec<f64>> = active
                .iter()
                .map(|&i| {
                    let d = grads[i].take().unwrap_or_else(|| self.eaves_gradient(p, g, &self.eaves[i]));
                    let flat = d.0.iter().chain(&d.1).cloned().collect();
                    grads[i] = Some(d);
                    flat
                })
                .collect();
            let base: Vec<f64> = lp.iter().chain(&lg).cloned().collect();
            let d = min_norm_combination(&base, &parts);
            out.push((d[..p.len()].to_vec(), d[p.len()..].to_vec()));
        }
        out
    }

    fn step(&self, p: &[f64], g: &[f64], gp: &[f64], gg: &[f64], eta: f64, fixed_g: bool) -> (Vec<f64>, Vec<f64>) {
        let mut p2: Vec<f64> = p.iter().zip(gp).map(|(a, b)| a + eta * b).collect();
        project_simplex(&mut p2);
        let mut g2 = g.to_vec();
        if !fixed_g {
            for (u, row) in g2.chunks_mut(self.ak).enumerate() {
                let scale = eta / p[u].max(1e-3);
                row.iter_mut().zip(&gg[u * self.ak..(u + 1) * self.ak]).for_each(|(a, b)| *a += scale * b);
                project_simplex(row);
            }
        }
        (p2, g2)
    }

    /// Projected-gradient ascent with backtracking on the true objective.
    pub fn ascend(&self, p: Vec<f64>, g: Vec<f64>, fixed_g: bool, max_iters: usize, tol: f64) -> Local {
        let mut p = p;
        let mut g = g;
        let mut e = self.evaluate(&p, &g, None, Effort::Fast, None);
        let mut eta = 0.5;
        let mut quiet = 0;
        let mut iterations = 0;
        while iterations < max_iters {
            iterations += 1;
            let mut accepted: Option<(Vec<f64>, Vec<f64>, Eval, f64)> = None;
            for (gp, gg) in self.directions(&p, &g, &e) {
                let mut t = eta;
                while t > 1e-12 {
                    let (p2, g2) = self.step(&p, &g, &gp, &gg, t, fixed_g);
                    let e2 = self.evaluate(&p2, &g2, Some(&e.legit.q), Effort::Fast, None);
                    if e2.value > e.value {
                        if accepted.as_ref().is_none_or(|a| e2.value > a.2.value) {
                            accepted = Some((p2, g2, e2, t));
                        }
                        break;
                    }
                    t *= 0.5;
                }
            }
            let Some((p2, g2, e2, t)) = accepted else { break };
            eta = t;
            let gain = e2.value - e.value;
            p = p2;
            g = g2;
            e = e2;
            eta = (eta * 2.0).min(64.0);
            quiet = if gain < tol * 1e-3 { quiet + 1 } else { 0 };
            if quiet >= 5 {
                break;
            }
        }
        let (gp, gg) = self.directions(&p, &g, &e).swap_remove(0);
        let (p1, g1) = self.step(&p, &g, &gp, &gg, 1.0, fixed_g);
        let stationarity = p.iter().zip(&p1).chain(g.iter().zip(&g1)).map(|(a, b)| (a - b).abs()).sum();
        Local { p, g, eval: e, iterations, stationarity }
    }
}

/// `base - Σ w_i parts[i]` of least Euclidean norm over the simplex of
/// weights, by Frank-Wolfe with exact line search.
fn min_norm_combination(base: &[f64], parts: &[Vec<f64>]) -> Vec<f64> {
    let mut w = vec![1.0 / parts.len() as f64; parts.len()];
    let combine = |w: &[f64]| -> Vec<f64> {
        let mut d = base.to_vec();
        for (wi, part) in w.iter().zip(parts) {
            d.iter_mut().zip(part).for_each(|(a, b)| *a -= wi * b);
        }
        d
    };
    for _ in 0..200 {
        let d = combine(&w);
        // d(w) is affine in w; grad of |d|^2 / 2 in w_i is -<d, part_i>
        let scores: Vec<f64> = parts.iter().map(|b| dot(&d, b)).collect();
        let (best, _) = scores.iter().enumerate().fold((0, f64::NEG_INFINITY), |m, (i, v)| if *v > m.1 { (i, *v) } else { m });
        let current: f64 = w.iter().zip(&scores).map(|(a, b)| a * b).sum();
        if scores[best] - current <= 1e-14 {
            break;
        }
        // move toward vertex `best`: direction in d-space is -(parts[best] - Σ w parts)
        let mean: Vec<f64> = base.iter().zip(&d).map(|(b, x)| b - x).collect();
        let dir: Vec<f64> = parts[best].iter().zip(&mean).map(|(a, m)| a - m).collect();
        let denom = dot(&dir, &dir);
        if denom <= 0.0 {
            break;
        }
        let gamma = (dot(&d, &dir) / denom).clamp(0.0, 1.0);
        w.iter_mut().for_each(|x| *x *= 1.0 - gamma);
        w[best] += gamma;
    }
    combine(&w)
}

/// Row-major `Λ (u x out) * Cᵀ (out x ak)` for `C` stored as `ak x out`.
fn mul_transpose(lambda: &[f64], u: usize, out: usize, c: &[f64], ak: usize) -> Vec<f64> {
    let mut r = vec![0.0; u * ak];
    for i in 0..u {
        let l = &lambda[i * out..(i + 1) * out];
        for x in 0..ak {
            r[i * ak + x] = dot(l, &c[x * out..(x + 1) * out]);
        }
    }
    r
}

/// Random stochastic rows with a random sharpening exponent, so that
/// restarts include nearly deterministic as well as diffuse structures.
pub(crate) fn random_rows(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let sharp: f64 = 1.0 + 3.0 * rng.random::<f64>();
        let mut row: Vec<f64> = dirichlet_sample(cols, rng).probs().iter().map(|x| x.powf(sharp)).collect();
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
        out.extend(row);
    }
    out
}
