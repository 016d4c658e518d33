use crate::error::{Error, Result};

/// `ln(sum(exp(x)))` with the maximum factored out.
pub fn logsumexp(logits: &[f64]) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + logits.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Mean over the batch of `W[y] * (-x[y] + logsumexp(x))`.
pub fn weighted_cross_entropy<L: AsRef<[f64]>>(logits: &[L], targets: &[usize], weights: &[f64]) -> Result<f64> {
    if logits.len() != targets.len() {
        return Err(Error::InvalidArgument(format!(
            "{} logit rows but {} targets",
            logits.len(),
            targets.len()
        )));
    }
    if logits.is_empty() {
        return Err(Error::Empty("cross-entropy batch"));
    }
    let mut total = 0.0;
    for (row, &target) in logits.iter().zip(targets) {
        let row = row.as_ref();
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("logits"));
        }
        if row.len() != weights.len() || target >= row.len() {
            return Err(Error::InvalidArgument(format!(
                "target {target} invalid for {} logits and {} weights",
                row.len(),
                weights.len()
            )));
        }
        total += weights[target] * (logsumexp(row) - row[target]);
    }
    Ok(total / logits.len() as f64)
}

/// Unweighted cross-entropy, `-ln softmax(x)[y]` averaged over the batch.
pub fn cross_entropy<L: AsRef<[f64]>>(logits: &[L], targets: &[usize]) -> Result<f64> {
    let width = logits.first().map_or(0, |r| r.as_ref().len());
    weighted_cross_entropy(logits, targets, &vec![1.0; width])
}
