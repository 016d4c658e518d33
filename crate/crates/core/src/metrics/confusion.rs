use crate::datamodel::{Category, GroundTruthSet, PredictionSet, ScoreRow, NUM_CLASSES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn from_decisions(decisions: &[bool], labels: &[bool]) -> Self {
        let mut c = Self::default();
        for (d, l) in decisions.iter().zip(labels) {
            match (d, l) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub dice: f64,
    pub ppv: f64,
    pub npv: f64,
}

fn ratio_or(num: u64, den: u64, empty: f64) -> f64 {
    if den == 0 {
        empty
    } else {
        num as f64 / den as f64
    }
}

/// Threshold metrics from a confusion table.
///
/// Empty denominators: sensitivity, specificity and dice fall back to 0,
/// ppv and npv to 1. Accuracy is computed as
/// `sensitivity * prevalence + specificity * (1 - prevalence)`.
pub fn binary_metrics(c: &ConfusionCounts) -> BinaryMetrics {
    let sensitivity = ratio_or(c.tp, c.tp + c.fn_, 0.0);
    let specificity = ratio_or(c.tn, c.tn + c.fp, 0.0);
    let prevalence = ratio_or(c.tp + c.fn_, c.total(), 0.0);
    let accuracy = if c.total() == 0 {
        0.0
    } else {
        sensitivity * prevalence + specificity * (1.0 - prevalence)
    };
    BinaryMetrics {
        accuracy,
        sensitivity,
        specificity,
        dice: ratio_or(2 * c.tp, 2 * c.tp + c.fp + c.fn_, 0.0),
        ppv: ratio_or(c.tp, c.tp + c.fp, 1.0),
        npv: ratio_or(c.tn, c.tn + c.fn_, 1.0),
    }
}

pub(crate) fn check_aligned(preds: &PredictionSet, truth: &GroundTruthSet) -> Result<()> {
    if preds.ids() != truth.ids() {
        return Err(Error::InvalidArgument(
            "predictions and ground truth are not aligned; run align first".into(),
        ));
    }
    Ok(())
}

/// One-vs-rest decisions for `category`: positive iff the confidence is at
/// least `threshold`.
pub fn binarize(
    preds: &PredictionSet,
    truth: &GroundTruthSet,
    category: Category,
    threshold: f64,
) -> Result<(Vec<bool>, ConfusionCounts)> {
    check_aligned(preds, truth)?;
    let decisions: Vec<bool> = preds.rows().iter().map(|r| r[category.index()] >= threshold).collect();
    let counts = ConfusionCounts::from_decisions(&decisions, &truth.binary_labels(category));
    Ok((decisions, counts))
}

/// Index of the largest entry; the first one wins ties.
pub fn argmax(row: &ScoreRow) -> Category {
    let mut best = 0;
    for i in 1..NUM_CLASSES {
        if row[i] > row[best] {
            best = i;
        }
    }
    Category::ALL[best]
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedAccuracy {
    pub value: f64,
    /// Per-category recall; `None` for categories absent from the truth.
    pub recalls: [Option<f64>; NUM_CLASSES],
}

impl BalancedAccuracy {
    /// Categories left out of the average because they never occur.
    pub fn missing(&self) -> Vec<Category> {
        Category::ALL
            .iter()
            .copied()
            .filter(|c| self.recalls[c.index()].is_none())
            .collect()
    }
}

/// Mean per-category recall under the argmax decision, over categories
/// that occur in `truth`.
pub fn balanced_accuracy(preds: &PredictionSet, truth: &GroundTruthSet) -> Result<BalancedAccuracy> {
    check_aligned(preds, truth)?;
    if truth.is_empty() {
        return Err(Error::Empty("balanced accuracy needs at least one image"));
    }
    let mut hits = [0u64; NUM_CLASSES];
    let mut totals = [0u64; NUM_CLASSES];
    for (row, label) in preds.rows().iter().zip(truth.labels()) {
        totals[label.index()] += 1;
        if argmax(row) == *label {
            hits[label.index()] += 1;
        }
    }
    let recalls: [Option<f64>; NUM_CLASSES] =
        std::array::from_fn(|i| (totals[i] > 0).then(|| hits[i] as f64 / totals[i] as f64));
    let present: Vec<f64> = recalls.iter().flatten().copied().collect();
    let value = present.iter().sum::<f64>() / present.len() as f64;
    Ok(BalancedAccuracy { value, recalls })
}
