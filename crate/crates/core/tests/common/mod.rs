//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls into the metric implementations.
#![allow(dead_code)]

use lesion_core::{Category, GroundTruthSet, PredictionSet, NUM_CLASSES};

/// Mann-Whitney pair statistic: fraction of (positive, negative) pairs where
/// the positive scores higher, ties counted as one half.
pub fn pair_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn distinct_desc(scores: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = scores.to_vec();
    t.sort_by(|a, b| b.partial_cmp(a).unwrap());
    t.dedup();
    t
}

/// (recall, precision) at every threshold `score >= t`, counted directly.
fn pr_points(scores: &[f64], labels: &[bool]) -> Vec<(f64, f64)> {
    let positives = labels.iter().filter(|l| **l).count() as f64;
    distinct_desc(scores)
        .into_iter()
        .map(|t| {
            let called: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] >= t).collect();
            let tp = called.iter().filter(|&&i| labels[i]).count() as f64;
            (tp / positives, tp / called.len() as f64)
        })
        .collect()
}

/// Interpolated average precision by exhaustive threshold sweep.
pub fn brute_average_precision(scores: &[f64], labels: &[bool]) -> f64 {
    let points = pr_points(scores, labels);
    let mut recalls: Vec<f64> = points.iter().map(|p| p.0).collect();
    recalls.sort_by(|a, b| a.partial_cmp(b).unwrap());
    recalls.dedup();
    let mut ap = 0.0;
    let mut prev = 0.0;
    for r in recalls {
        let best = points
            .iter()
            .filter(|p| p.0 >= r)
            .map(|p| p.1)
            .fold(0.0, f64::max);
        ap += (r - prev) * best;
        prev = r;
    }
    ap
}

/// ROC vertices (fpr, tpr) by direct counting at each threshold.
pub fn brute_roc(scores: &[f64], labels: &[bool]) -> Vec<(f64, f64)> {
    let p = labels.iter().filter(|l| **l).count() as f64;
    let n = labels.len() as f64 - p;
    let mut pts = vec![(0.0, 0.0)];
    for t in distinct_desc(scores) {
        let tp = (0..scores.len()).filter(|&i| scores[i] >= t && labels[i]).count() as f64;
        let fp = (0..scores.len()).filter(|&i| scores[i] >= t && !labels[i]).count() as f64;
        pts.push((fp / n, tp / p));
    }
    pts
}

/// Partial AUC above a sensitivity floor, computed as the full polygon area
/// minus the area left of the crossing point.
pub fn brute_partial_auc(scores: &[f64], labels: &[bool], min_tpr: f64) -> f64 {
    let pts = brute_roc(scores, labels);
    let total: f64 = pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum();
    // first point along the polyline where tpr reaches the floor
    let mut f0 = 1.0;
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y1 >= min_tpr {
            f0 = if y0 >= min_tpr {
                x0
            } else {
                x0 + (x1 - x0) * (min_tpr - y0) / (y1 - y0)
            };
            break;
        }
    }
    let mut left = 0.0;
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x0 >= f0 {
            break;
        }
        let xr = x1.min(f0);
        let yr = if x1 == x0 { y1 } else { y0 + (y1 - y0) * (xr - x0) / (x1 - x0) };
        left += (xr - x0) * (y0 + yr) / 2.0;
    }
    total - left
}

/// (tp, fp, tn, fn) for positive-iff-score->=-threshold.
pub fn brute_confusion(scores: &[f64], labels: &[bool], threshold: f64) -> (u64, u64, u64, u64) {
    let mut c = (0, 0, 0, 0);
    for (s, l) in scores.iter().zip(labels) {
        match (*s >= threshold, *l) {
            (true, true) => c.0 += 1,
            (true, false) => c.1 += 1,
            (false, false) => c.2 += 1,
            (false, true) => c.3 += 1,
        }
    }
    c
}

/// accuracy, sensitivity, specificity, dice, ppv, npv straight from counts.
pub fn brute_binary(c: (u64, u64, u64, u64)) -> [f64; 6] {
    let (tp, fp, tn, fn_) = (c.0 as f64, c.1 as f64, c.2 as f64, c.3 as f64);
    let div = |a: f64, b: f64, d: f64| if b == 0.0 { d } else { a / b };
    [
        (tp + tn) / (tp + fp + tn + fn_),
        div(tp, tp + fn_, 0.0),
        div(tn, tn + fp, 0.0),
        div(2.0 * tp, 2.0 * tp + fp + fn_, 0.0),
        div(tp, tp + fp, 1.0),
        div(tn, tn + fn_, 1.0),
    ]
}

pub fn brute_balanced_accuracy(preds: &PredictionSet, truth: &GroundTruthSet) -> f64 {
    let mut recalls = Vec::new();
    for c in Category::ALL {
        let members: Vec<usize> = (0..truth.len()).filter(|&i| truth.labels()[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        let hit = members
            .iter()
            .filter(|&&i| {
                let row = preds.row(i);
                let top = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                // first index reaching the max
                row.iter().position(|v| *v == top) == Some(c.index())
            })
            .count();
        recalls.push(hit as f64 / members.len() as f64);
    }
    recalls.iter().sum::<f64>() / recalls.len() as f64
}

/// Every cell of the metrics table recomputed from scratch. Rows follow
/// `Metric::ALL`; `None` where a ranking metric is undefined.
pub fn brute_table(preds: &PredictionSet, truth: &GroundTruthSet, threshold: f64) -> Vec<[Option<f64>; NUM_CLASSES]> {
    let mut rows = vec![[None; NUM_CLASSES]; 9];
    for c in Category::ALL {
        let i = c.index();
        let scores: Vec<f64> = preds.rows().iter().map(|r| r[i]).collect();
        let labels: Vec<bool> = truth.labels().iter().map(|l| *l == c).collect();
        let pos = labels.iter().filter(|l| **l).count();
        if pos > 0 && pos < labels.len() {
            rows[0][i] = Some(pair_auc(&scores, &labels));
            rows[1][i] = Some(brute_partial_auc(&scores, &labels, 0.8));
        }
        if pos > 0 {
            rows[2][i] = Some(brute_average_precision(&scores, &labels));
        }
        let b = brute_binary(brute_confusion(&scores, &labels, threshold));
        for (k, v) in b.iter().enumerate() {
            rows[3 + k][i] = Some(*v);
        }
    }
    rows
}

/// Deterministic xorshift stream for fixture generation in tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random binary problem with at least one label of each kind and a
/// configurable amount of tied scores.
pub fn random_binary_instance(rng: &mut TestRng, max_n: u64) -> (Vec<f64>, Vec<bool>) {
    let n = 2 + rng.below(max_n - 1) as usize;
    let levels = 1 + rng.below(n as u64 + 1);
    let mut labels: Vec<bool> = (0..n).map(|_| rng.below(2) == 1).collect();
    labels[0] = true;
    labels[1] = false;
    let scores = (0..n).map(|_| rng.below(levels) as f64 / levels as f64).collect();
    (scores, labels)
}
