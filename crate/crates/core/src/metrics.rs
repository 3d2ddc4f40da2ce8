//! Recovery metrics: edge-detection quality (Matthews correlation) and
//! weight accuracy (relative error), per slot and averaged.

use crate::graph::WeightVector;
use crate::{Error, Result};

/// Weights at or below this count as absent when binarizing supports.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 1e-4;

/// Matthews correlation coefficient between the supports of `estimate` and
/// `truth`, binarized at `threshold`. Degenerate confusion tables (a
/// zero-product denominator) score 0.
pub fn mcc(estimate: &WeightVector, truth: &WeightVector, threshold: f64) -> Result<f64> {
    if estimate.d() != truth.d() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has {} vertices, truth has {}",
            estimate.d(),
            truth.d()
        )));
    }
    let (mut tp, mut tn, mut fp, mut fne) = (0f64, 0f64, 0f64, 0f64);
    for (e, t) in estimate.values().iter().zip(truth.values().iter()) {
        match (*e > threshold, *t > threshold) {
            (true, true) => tp += 1.0,
            (false, false) => tn += 1.0,
            (true, false) => fp += 1.0,
            (false, true) => fne += 1.0,
        }
    }
    let denom = (tp + fp) * (tp + fne) * (tn + fp) * (tn + fne);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((tp * tn - fp * fne) / denom.sqrt())
}

/// ‖estimate − truth‖₂ / ‖truth‖₂. A zero truth scores 0 when the estimate
/// is also zero and 1 otherwise.
pub fn relative_error(estimate: &WeightVector, truth: &WeightVector) -> Result<f64> {
    if estimate.d() != truth.d() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has {} vertices, truth has {}",
            estimate.d(),
            truth.d()
        )));
    }
    let mut diff_sq = 0.0;
    let mut truth_sq = 0.0;
    for (e, t) in estimate.values().iter().zip(truth.values().iter()) {
        diff_sq += (e - t) * (e - t);
        truth_sq += t * t;
    }
    if truth_sq == 0.0 {
        return Ok(if diff_sq == 0.0 { 0.0 } else { 1.0 });
    }
    Ok((diff_sq / truth_sq).sqrt())
}

/// Per-slot metrics plus their means over the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mcc_per_slot: Vec<f64>,
    pub rel_error_per_slot: Vec<f64>,
    pub mean_mcc: f64,
    pub mean_rel_error: f64,
}

/// Scores an estimated sequence against the ground truth slot by slot.
pub fn evaluate(
    estimates: &[WeightVector],
    truths: &[WeightVector],
    threshold: f64,
) -> Result<EvalReport> {
    if estimates.len() != truths.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} estimated slots vs {} true slots",
            estimates.len(),
            truths.len()
        )));
    }
    if estimates.is_empty() {
        return Err(Error::EmptyInput("no slots to evaluate".into()));
    }
    let mut mcc_per_slot = Vec::with_capacity(estimates.len());
    let mut rel_error_per_slot = Vec::with_capacity(estimates.len());
    for (e, t) in estimates.iter().zip(truths.iter()) {
        mcc_per_slot.push(mcc(e, t, threshold)?);
        rel_error_per_slot.push(relative_error(e, t)?);
    }
    let n = estimates.len() as f64;
    let mean_mcc = mcc_per_slot.iter().sum::<f64>() / n;
    let mean_rel_error = rel_error_per_slot.iter().sum::<f64>() / n;
    Ok(EvalReport {
        mcc_per_slot,
        rel_error_per_slot,
        mean_mcc,
        mean_rel_error,
    })
}
