use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Items scoring at or above this value are called positive. The first
    /// point uses `+inf`.
    pub threshold: f64,
}

/// ROC curve from (0, 0) to (1, 1), one point per distinct score.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
}

impl RocCurve {
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }
}

pub(crate) fn check_inputs(scores: &[f64], labels: &[bool]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("scores"));
    }
    Ok(())
}

/// Cumulative (true positive, false positive) counts at each distinct
/// score, walking from the highest score down. Tied scores share one entry.
pub(crate) fn cumulative_counts(scores: &[f64], labels: &[bool]) -> Vec<(f64, usize, usize)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut out: Vec<(f64, usize, usize)> = Vec::new();
    let (mut tp, mut fp) = (0, 0);
    for (k, &i) in order.iter().enumerate() {
        if labels[i] {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_group = order.get(k + 1).is_none_or(|&j| scores[j] != scores[i]);
        if last_of_group {
            out.push((scores[i], tp, fp));
        }
    }
    out
}

pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    check_inputs(scores, labels)?;
    let positives = labels.iter().filter(|l| **l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidArgument(
            "ROC curve needs at least one positive and one negative label".into(),
        ));
    }
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    for (threshold, tp, fp) in cumulative_counts(scores, labels) {
        points.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold,
        });
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Area under the curve restricted to the part where sensitivity is at
/// least `min_tpr`.
///
/// The lower integration bound is the false positive rate at which the
/// curve first reaches `min_tpr`, interpolated linearly along the segment
/// that crosses it. The result is not rescaled: a perfect classifier scores
/// 1.0 and chance scores `(1 - min_tpr^2) / 2`.
pub fn auc_above_sensitivity(curve: &RocCurve, min_tpr: f64) -> f64 {
    let start = sensitivity_crossing(curve, min_tpr);
    let mut area = 0.0;
    for w in curve.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.fpr <= start || b.fpr == a.fpr {
            continue;
        }
        let left = a.fpr.max(start);
        let t = (left - a.fpr) / (b.fpr - a.fpr);
        let left_tpr = a.tpr + t * (b.tpr - a.tpr);
        area += (b.fpr - left) * (left_tpr + b.tpr) / 2.0;
    }
    area
}

/// False positive rate where the curve first reaches `min_tpr`.
pub fn sensitivity_crossing(curve: &RocCurve, min_tpr: f64) -> f64 {
    let pts = &curve.points;
    if pts[0].tpr >= min_tpr {
        return pts[0].fpr;
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.tpr < min_tpr && b.tpr >= min_tpr {
            let t = (min_tpr - a.tpr) / (b.tpr - a.tpr);
            return a.fpr + t * (b.fpr - a.fpr);
        }
    }
    1.0
}
