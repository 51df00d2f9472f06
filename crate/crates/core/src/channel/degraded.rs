use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::{mix_channel, AvwcSpec};
use crate::error::{Error, Result};
use crate::prob::{Channel, Distribution};

/// Largest reconstruction error accepted as "degraded".
pub const DEGRADED_TOL: f64 = 1e-7;

/// Outcome of testing `V = T ∘ W` for some stochastic `T: B -> C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradednessCertificate {
    pub feasible: bool,
    /// The residual-minimising `T` (absent only if the LP solver failed).
    pub t: Option<Channel>,
    /// `max_{x,z} |V(z|x) - Σ_y W(y|x) T(z|y)|`, recomputed from `t`.
    pub residual: f64,
}

/// Minimises `max_{x,z} |V(z|x) - (W T)(z|x)|` over stochastic `T` and
/// reports feasibility at [`DEGRADED_TOL`].
pub fn degraded_check(w: &Channel, v: &Channel) -> Result<DegradednessCertificate> {
    if w.inputs() != v.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "W has {} inputs, V has {}",
            w.inputs(),
            v.inputs()
        )));
    }
    let (nx, ny, nz) = (w.inputs(), w.outputs(), v.outputs());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let t_vars: Vec<_> = (0..ny * nz).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let slack = lp.add_var(1.0, (0.0, f64::INFINITY));
    for y in 0..ny {
        let mut row = LinearExpr::empty();
        for z in 0..nz {
            row.add(t_vars[y * nz + z], 1.0);
        }
        lp.add_constraint(row, ComparisonOp::Eq, 1.0);
    }
    for x in 0..nx {
        for z in 0..nz {
            let mut upper = LinearExpr::empty();
            let mut lower = LinearExpr::empty();
            for y in 0..ny {
                let wy = w.get(x, y);
                if wy != 0.0 {
                    upper.add(t_vars[y * nz + z], wy);
                    lower.add(t_vars[y * nz + z], wy);
                }
            }
            upper.add(slack, -1.0);
            lower.add(slack, 1.0);
            lp.add_constraint(upper, ComparisonOp::Le, v.get(x, z));
            lp.add_constraint(lower, ComparisonOp::Ge, v.get(x, z));
        }
    }
    let solution = lp.solve().ok().and_then(|o| o.into_solution().ok());
    let Some(solution) = solution else {
        return Ok(DegradednessCertificate { feasible: false, t: None, residual: f64::INFINITY });
    };
    let mut data = Vec::with_capacity(ny * nz);
    for y in 0..ny {
        let mut row: Vec<f64> = (0..nz).map(|z| solution.var_value(t_vars[y * nz + z]).max(0.0)).collect();
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|p| *p /= total);
        } else {
            row.iter_mut().for_each(|p| *p = 1.0 / nz as f64);
        }
        data.extend(row);
    }
    let t = Channel::from_flat_unchecked(ny, nz, data);
    let residual = reconstruction_residual(w, v, &t);
    Ok(DegradednessCertificate { feasible: residual <= DEGRADED_TOL, t: Some(t), residual })
}

fn reconstruction_residual(w: &Channel, v: &Channel, t: &Channel) -> f64 {
    let wt = w.then(t).expect("dimensions checked");
    wt.as_flat().iter().zip(v.as_flat()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Lowest state `s*` such that every `V_s` is degraded from `V_{s*}`.
pub fn best_eavesdropper_check(spec: &AvwcSpec) -> Result<Option<usize>> {
    let eaves = spec.eaves();
    'outer: for (s, top) in eaves.iter().enumerate() {
        for (s2, other) in eaves.iter().enumerate() {
            if s2 != s && top != other && !degraded_check(top, other)?.feasible {
                continue 'outer;
            }
        }
        return Ok(Some(s));
    }
    Ok(None)
}

/// Result of a grid-based strong degradedness check.
///
/// `holds == true` means only that no grid point refuted the property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongDegradedness {
    pub holds: bool,
    /// `witnesses[g][s2]` is the certificate for `V_{s2}` against `W_{q1}`,
    /// `q1 = grid[g]`.
    pub witnesses: Vec<Vec<DegradednessCertificate>>,
}

/// States are indexed `s = s1 * s2_count + s2`. Checks that `W` depends only
/// on `s1`, `V` only on `s2`, and that each `V_{s2}` is degraded from
/// `W_{q1}` for every `q1` in `q1_grid`.
pub fn strongly_degraded_check(
    spec: &AvwcSpec,
    s1_count: usize,
    s2_count: usize,
    q1_grid: &[Distribution],
) -> Result<StrongDegradedness> {
    if s1_count == 0 || s2_count == 0 || s1_count * s2_count != spec.states() {
        return Err(Error::Structural(format!(
            "{} states cannot be read as {s1_count} x {s2_count}",
            spec.states()
        )));
    }
    let idx = |s1: usize, s2: usize| s1 * s2_count + s2;
    for s1 in 0..s1_count {
        for s2 in 0..s2_count {
            if spec.legit()[idx(s1, s2)] != spec.legit()[idx(s1, 0)] {
                return Err(Error::Structural(format!("W at ({s1},{s2}) depends on s2")));
            }
            if spec.eaves()[idx(s1, s2)] != spec.eaves()[idx(0, s2)] {
                return Err(Error::Structural(format!("V at ({s1},{s2}) depends on s1")));
            }
        }
    }
    let w_family: Vec<Channel> = (0..s1_count).map(|s1| spec.legit()[idx(s1, 0)].clone()).collect();
    let v_family: Vec<&Channel> = (0..s2_count).map(|s2| &spec.eaves()[idx(0, s2)]).collect();
    let mut holds = true;
    let mut witnesses = Vec::with_capacity(q1_grid.len());
    for q1 in q1_grid {
        let wq = mix_channel(&w_family, q1)?;
        let row = v_family.iter().map(|v| degraded_check(&wq, v)).collect::<Result<Vec<_>>>()?;
        holds &= row.iter().all(|c| c.feasible);
        witnesses.push(row);
    }
    Ok(StrongDegradedness { holds, witnesses })
}
