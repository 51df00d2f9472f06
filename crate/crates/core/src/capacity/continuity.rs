use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate_rsk, CapacityOptions};
use crate::channel::{dirichlet_sample, hausdorff_distance, AvwcSpec};
use crate::error::{Error, Result};
use crate::prob::Channel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub radius: f64,
    pub trial: usize,
    /// Exact Hausdorff distance of the perturbed spec.
    pub distance: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub base_value: f64,
    pub rows: Vec<ContinuityRow>,
    /// `(radius, max |ΔR̂|, max |ΔR̂| / d)` per radius.
    pub summary: Vec<(f64, f64, f64)>,
}

fn perturb_channel(c: &Channel, radius: f64, rng: &mut ChaCha8Rng) -> Result<Channel> {
    let mut data = Vec::with_capacity(c.as_flat().len());
    for row in c.rows() {
        let target = dirichlet_sample(c.outputs(), rng);
        let dist: f64 = row.iter().zip(target.probs()).map(|(a, b)| (a - b).abs()).sum();
        let lam = if dist > 0.0 { (radius / dist).min(1.0) } else { 0.0 };
        data.extend(row.iter().zip(target.probs()).map(|(a, b)| (1.0 - lam) * a + lam * b));
    }
    Channel::from_flat(c.inputs(), c.outputs(), data)
}

/// Moves every row of every channel toward a random row by total variation
/// `radius` (or all the way, if closer).
pub fn perturb(avwc: &AvwcSpec, radius: f64, rng: &mut ChaCha8Rng) -> Result<AvwcSpec> {
    if !(radius >= 0.0) {
        return Err(Error::OutOfRange(format!("radius must be non-negative, got {radius}")));
    }
    let legit = avwc.legit().iter().map(|c| perturb_channel(c, radius, rng)).collect::<Result<_>>()?;
    let eaves = avwc.eaves().iter().map(|c| perturb_channel(c, radius, rng)).collect::<Result<_>>()?;
    AvwcSpec::new(legit, eaves)
}

/// Re-evaluates `R̂_k` on `trials` perturbations per radius.
pub fn continuity_probe(
    avwc: &AvwcSpec,
    radii: &[f64],
    k: usize,
    trials: usize,
    opts: &CapacityOptions,
) -> Result<ContinuityReport> {
    let base_value = evaluate_rsk(avwc, k, opts)?.value_bits_per_letter;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &radius in radii {
        let (mut worst, mut ratio) = (0.0f64, 0.0f64);
        for trial in 0..trials {
            let spec = perturb(avwc, radius, &mut rng)?;
            let distance = hausdorff_distance(avwc, &spec)?;
            let delta = (evaluate_rsk(&spec, k, opts)?.value_bits_per_letter - base_value).abs();
            worst = worst.max(delta);
            if distance > 0.0 {
                ratio = ratio.max(delta / distance);
            }
            rows.push(ContinuityRow { radius, trial, distance, delta });
        }
        summary.push((radius, worst, ratio));
    }
    Ok(ContinuityReport { base_value, rows, summary })
}
