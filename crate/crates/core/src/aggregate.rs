//! Combining predictions: test-time-augmentation merging, ensemble means and
//! softmax.

use crate::datamodel::{PredictionSet, ScoreRow, NUM_CLASSES};
use crate::error::{Error, Result};

fn check_same_ids(reference: &PredictionSet, others: &[&PredictionSet]) -> Result<()> {
    for other in others {
        if other.ids() != reference.ids() {
            let missing: Vec<String> = reference
                .ids()
                .iter()
                .filter(|id| !other.ids().contains(id))
                .cloned()
                .collect();
            let extra: Vec<String> = other
                .ids()
                .iter()
                .filter(|id| !reference.ids().contains(id))
                .cloned()
                .collect();
            if missing.is_empty() && extra.is_empty() {
                return Err(Error::InvalidArgument("prediction sets list the same ids in a different order".into()));
            }
            return Err(Error::IdMismatch {
                missing_in_predictions: missing,
                missing_in_truth: extra,
            });
        }
    }
    Ok(())
}

/// Order-independent sum: values are sorted before accumulation.
fn sorted_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// `beta * regular + (1 - beta) * mean(augmented)`, cell by cell.
pub fn tta_merge(regular: &PredictionSet, augmented: &[PredictionSet], beta: f64) -> Result<PredictionSet> {
    if augmented.is_empty() {
        return Err(Error::Empty("augmented prediction list"));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta must lie in [0, 1], got {beta}")));
    }
    let aug_mean = ensemble_mean(augmented)?;
    check_same_ids(regular, &[&aug_mean])?;
    let rows = regular
        .rows()
        .iter()
        .zip(aug_mean.rows())
        .map(|(r, a)| std::array::from_fn(|c| beta * r[c] + (1.0 - beta) * a[c]))
        .collect();
    Ok(regular.with_rows(rows))
}

/// Cell-wise arithmetic mean of aligned prediction sets. The result does
/// not depend on member order.
pub fn ensemble_mean(members: &[PredictionSet]) -> Result<PredictionSet> {
    let first = members.first().ok_or(Error::Empty("ensemble member list"))?;
    let refs: Vec<&PredictionSet> = members.iter().collect();
    check_same_ids(first, &refs[1..])?;
    let n = members.len() as f64;
    let mut buf = vec![0.0; members.len()];
    let rows = (0..first.len())
        .map(|i| {
            let mut row: ScoreRow = [0.0; NUM_CLASSES];
            for (c, cell) in row.iter_mut().enumerate() {
                for (b, m) in buf.iter_mut().zip(members) {
                    *b = m.row(i)[c];
                }
                *cell = sorted_sum(&mut buf) / n;
            }
            row
        })
        .collect();
    Ok(first.with_rows(rows))
}

/// Weighted mean of aligned prediction sets; weights are normalized to sum
/// to one.
pub fn ensemble_weighted_mean(members: &[PredictionSet], weights: &[f64]) -> Result<PredictionSet> {
    let first = members.first().ok_or(Error::Empty("ensemble member list"))?;
    if weights.len() != members.len() {
        return Err(Error::InvalidArgument(format!(
            "{} members but {} weights",
            members.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidArgument("ensemble weights must be non-negative with a positive sum".into()));
    }
    let refs: Vec<&PredictionSet> = members.iter().collect();
    check_same_ids(first, &refs[1..])?;
    let total: f64 = weights.iter().sum();
    let mut buf = vec![0.0; members.len()];
    let rows = (0..first.len())
        .map(|i| {
            std::array::from_fn(|c| {
                for ((b, m), w) in buf.iter_mut().zip(members).zip(weights) {
                    *b = w * m.row(i)[c];
                }
                sorted_sum(&mut buf) / total
            })
        })
        .collect();
    Ok(first.with_rows(rows))
}

/// Exponential normalization with the maximum subtracted first.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::Empty("logits"));
    }
    if logits.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("logits"));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}
