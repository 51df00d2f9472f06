use crate::budget::Budget;
use crate::channel::{mix_channel, product_channel, AvwcSpec};
use crate::error::{Error, Result};
use crate::prob::{matmul, mi_raw, output_law, Distribution};
use crate::seq;

fn grid_points(steps: usize, parts: usize) -> Vec<Vec<f64>> {
    seq::compositions(steps, parts)
        .into_iter()
        .map(|c| c.into_iter().map(|x| x as f64 / steps as f64).collect())
        .collect()
}

/// Exhaustive grid search over the rows of `P_{X^k|U}` at step `1/resolution`
/// and over `P_U` at step `1/max(resolution, |U|)`, with `|U| ≤ min(|A|^k, u_cap)`.
///
/// For `k = 1` the inner minimum over mixtures is taken on a dense grid and
/// then lowered by the Frank-Wolfe gap at the grid minimiser, so the result
/// is a certified lower bound on the supremum. For `k ≥ 2` the grid minimum
/// is used as is.
pub fn brute_force_oracle(
    avwc: &AvwcSpec,
    k: usize,
    resolution: usize,
    u_cap: Option<usize>,
    budget: &Budget,
) -> Result<f64> {
    if k == 0 || resolution == 0 {
        return Err(Error::OutOfRange("k and resolution must be positive".into()));
    }
    let ak = seq::count(avwc.input_size(), k)?;
    let bk = seq::count(avwc.legit_output_size(), k)?;
    let ck = seq::count(avwc.eaves_output_size(), k)?;
    let u = u_cap.map_or(ak, |c| c.clamp(1, ak));
    let s = avwc.states();
    let q_steps = match s {
        1 => 1,
        2 => 400,
        3 => 40,
        _ => 12,
    };
    let qs = grid_points(q_steps, s);
    let p_grid = grid_points(resolution.max(u), u);
    let row_grid = grid_points(resolution, ak);
    let structures = p_grid.len() as f64 * (row_grid.len() as f64).powi(u as i32);
    let sk = seq::count(s, k)?;
    budget.check(
        "brute-force oracle",
        structures * (u * ak) as f64 * ((qs.len() * bk) as f64 + (sk * ck) as f64),
    )?;

    let single: Vec<Vec<f64>> = avwc.legit().iter().map(|w| w.as_flat().to_vec()).collect();
    let legit_tables: Vec<Vec<f64>> = qs
        .iter()
        .map(|q| Ok(mix_channel(avwc.legit(), &Distribution::new(q.clone())?)?.power(k)?.as_flat().to_vec()))
        .collect::<Result<_>>()?;
    let eaves_tables: Vec<Vec<f64>> = seq::all(s, k)?
        .map(|st| Ok(product_channel(avwc.eaves(), &st)?.as_flat().to_vec()))
        .collect::<Result<_>>()?;

    let mut best = 0.0f64;
    let mut idx = vec![0usize; u];
    loop {
        let g: Vec<f64> = idx.iter().flat_map(|&i| row_grid[i].iter().copied()).collect();
        for p in &p_grid {
            let mut top = f64::NEG_INFINITY;
            for v in &eaves_tables {
                top = top.max(mi_raw(p, &matmul(&g, u, ak, v, ck), ck));
            }
            let mut low = (f64::INFINITY, 0);
            for (i, w) in legit_tables.iter().enumerate() {
                let val = mi_raw(p, &matmul(&g, u, ak, w, bk), bk);
                if val < low.0 {
                    low = (val, i);
                }
            }
            let mut legit = low.0;
            if k == 1 && s > 1 {
                legit -= frank_wolfe_gap(p, &g, u, ak, bk, &single, &legit_tables[low.1], &qs[low.1]);
            }
            best = best.max(legit - top);
        }
        // odometer over the row choices
        let mut pos = 0;
        while pos < u {
            idx[pos] += 1;
            if idx[pos] < row_grid.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == u {
            break;
        }
    }
    Ok(best / k as f64)
}

// g·q - min_s g_s for the convex map q -> I(U;Y_q); bounds f(q) - min f.
#[allow(clippy::too_many_arguments)]
fn frank_wolfe_gap(
    p: &[f64],
    g: &[f64],
    u: usize,
    a: usize,
    b: usize,
    family: &[Vec<f64>],
    wq: &[f64],
    q: &[f64],
) -> f64 {
    let h = matmul(g, u, a, wq, b);
    let py = output_law(p, &h, b);
    let mut lambda = vec![0.0; u * b];
    for i in 0..u {
        for y in 0..b {
            let hy = h[i * b + y];
            if p[i] > 0.0 && hy > 0.0 {
                lambda[i * b + y] = p[i] * (hy / py[y]).log2();
            } else if p[i] > 0.0 && py[y] > 0.0 {
                // derivative of x log x at 0 is unbounded below; no finite certificate
                return f64::INFINITY;
            }
        }
    }
    let grads: Vec<f64> = family
        .iter()
        .map(|w| {
            let hs = matmul(g, u, a, w, b);
            hs.iter().zip(&lambda).map(|(x, l)| x * l).sum()
        })
        .collect();
    let at_q: f64 = grads.iter().zip(q).map(|(x, y)| x * y).sum();
    let min = grads.iter().cloned().fold(f64::INFINITY, f64::min);
    (at_q - min).max(0.0)
}
