use super::AvwcSpec;
use crate::error::{Error, Result};
use crate::prob::{tv_distance, Channel};

/// `‖W - W̃‖_o = max_a ‖W(·|a) - W̃(·|a)‖_1`.
pub fn operator_norm_distance(w: &Channel, w2: &Channel) -> Result<f64> {
    if (w.inputs(), w.outputs()) != (w2.inputs(), w2.outputs()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            w.inputs(),
            w.outputs(),
            w2.inputs(),
            w2.outputs()
        )));
    }
    w.rows().zip(w2.rows()).map(|(a, b)| tv_distance(a, b)).try_fold(0.0, |m, d| Ok(f64::max(m, d?)))
}

// max over `from` of the distance to the nearest member of `to`
fn directed(from: &[Channel], to: &[Channel]) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in from {
        let mut best = f64::INFINITY;
        for b in to {
            best = best.min(operator_norm_distance(a, b)?);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Hausdorff distance between two AVWCs over the same alphabets: the larger
/// of the legitimate-side and eavesdropper-side Hausdorff distances.
pub fn hausdorff_distance(a: &AvwcSpec, b: &AvwcSpec) -> Result<f64> {
    let dims = |s: &AvwcSpec| (s.input_size(), s.legit_output_size(), s.eaves_output_size());
    if dims(a) != dims(b) {
        return Err(Error::DimensionMismatch(format!("alphabets {:?} vs {:?}", dims(a), dims(b))));
    }
    Ok([
        directed(a.legit(), b.legit())?,
        directed(b.legit(), a.legit())?,
        directed(a.eaves(), b.eaves())?,
        directed(b.eaves(), a.eaves())?,
    ]
    .into_iter()
    .fold(0.0, f64::max))
}
