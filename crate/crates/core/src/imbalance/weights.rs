use crate::datamodel::{normalize_to_len, Category, ClassCounts, WeightVector, NUM_CLASSES};
use crate::error::{Error, Result};

/// Effective number of samples `(1 - beta^n) / (1 - beta)`.
///
/// Evaluated as `-expm1(n * ln1p(-(1 - beta))) / (1 - beta)` so that it
/// stays accurate as `beta` approaches one.
pub fn effective_number(n: u64, beta: f64) -> f64 {
    let gap = 1.0 - beta;
    -(n as f64 * (-gap).ln_1p()).exp_m1() / gap
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta must lie in [0, 1), got {beta}")));
    }
    Ok(())
}

fn check_nonzero(counts: &ClassCounts) -> Result<()> {
    let empty = counts.empty_classes();
    if empty.is_empty() {
        Ok(())
    } else {
        Err(Error::ZeroCount(empty))
    }
}

/// Class weights `1 / E(n_c)`, rescaled to sum to the number of classes.
///
/// `beta = 0` gives equal weights; as `beta -> 1` the weights approach the
/// normalized inverse class frequencies.
pub fn effective_weights(counts: &ClassCounts, beta: f64) -> Result<WeightVector> {
    check_beta(beta)?;
    check_nonzero(counts)?;
    let raw: [f64; NUM_CLASSES] = counts.as_array().map(|n| 1.0 / effective_number(n, beta));
    WeightVector::new(normalize_to_len(&raw))
}

/// Weights proportional to `1 / n_c`, rescaled to sum to the number of
/// classes.
pub fn inverse_frequency_weights(counts: &ClassCounts) -> Result<WeightVector> {
    check_nonzero(counts)?;
    let raw: [f64; NUM_CLASSES] = counts.as_array().map(|n| 1.0 / n as f64);
    WeightVector::new(normalize_to_len(&raw))
}

/// Same as [`inverse_frequency_weights`] for an arbitrary number of classes.
pub fn inverse_frequency<const N: usize>(counts: &[u64; N]) -> Result<[f64; N]> {
    if let Some(i) = counts.iter().position(|n| *n == 0) {
        let name = Category::from_index(i).map_or_else(|| format!("class {i}"), |c| c.to_string());
        return Err(Error::InvalidArgument(format!("zero sample count for {name}")));
    }
    Ok(normalize_to_len(&counts.map(|n| 1.0 / n as f64)))
}
