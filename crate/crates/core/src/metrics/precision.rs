use super::roc::{check_inputs, cumulative_counts};
use crate::error::{Error, Result};

/// Area under the interpolated precision-recall curve.
///
/// Precision at each recall level is replaced by the highest precision
/// reached at that recall or any larger one; the area is the step sum over
/// recall increments. Tied scores form a single operating point.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let positives = labels.iter().filter(|l| **l).count();
    if positives == 0 {
        return Err(Error::InvalidArgument("average precision needs at least one positive".into()));
    }
    let ops: Vec<(f64, f64)> = cumulative_counts(scores, labels)
        .into_iter()
        .map(|(_, tp, fp)| (tp as f64 / positives as f64, tp as f64 / (tp + fp) as f64))
        .collect();
    // running max of precision from the high-recall end
    let mut envelope = vec![0.0; ops.len()];
    let mut best: f64 = 0.0;
    for (i, (_, p)) in ops.iter().enumerate().rev() {
        best = best.max(*p);
        envelope[i] = best;
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for ((recall, _), p) in ops.iter().zip(&envelope) {
        ap += (recall - prev_recall) * p;
        prev_recall = *recall;
    }
    Ok(ap)
}
