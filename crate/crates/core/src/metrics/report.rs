use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::confusion::{balanced_accuracy, binarize, binary_metrics, check_aligned, BalancedAccuracy};
use super::precision::average_precision;
use super::roc::{auc, auc_above_sensitivity, roc_curve};
use crate::datamodel::{Category, ClassCounts, GroundTruthSet, PredictionSet, NUM_CLASSES};
use crate::error::Result;

/// Rows of the ensemble metrics table, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Auc,
    AucSens80,
    AvgPrecision,
    Accuracy,
    Sensitivity,
    Specificity,
    Dice,
    Ppv,
    Npv,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Auc,
        Metric::AucSens80,
        Metric::AvgPrecision,
        Metric::Accuracy,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Dice,
        Metric::Ppv,
        Metric::Npv,
    ];

    /// Machine-readable key.
    pub fn key(self) -> &'static str {
        match self {
            Metric::Auc => "auc",
            Metric::AucSens80 => "auc_sens80",
            Metric::AvgPrecision => "avg_precision",
            Metric::Accuracy => "accuracy",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Dice => "dice",
            Metric::Ppv => "ppv",
            Metric::Npv => "npv",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Auc => "AUC",
            Metric::AucSens80 => "AUC, Sens>80%",
            Metric::AvgPrecision => "Avg. Precision",
            Metric::Accuracy => "Accuracy",
            Metric::Sensitivity => "Sensitivity",
            Metric::Specificity => "Specificity",
            Metric::Dice => "Dice Coeff",
            Metric::Ppv => "PPV",
            Metric::Npv => "NPV",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportConfig {
    /// Confidence at or above which a one-vs-rest prediction is positive.
    pub threshold: f64,
    /// Sensitivity floor for the partial AUC.
    pub min_tpr: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            min_tpr: 0.8,
        }
    }
}

/// All metrics, per category and averaged, plus balanced accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// `values[metric][category]`; ranking metrics are `None` when a
    /// category has no positives (or, for AUC, no negatives).
    values: BTreeMap<MetricKey, [Option<f64>; NUM_CLASSES]>,
    pub balanced_accuracy: BalancedAccuracy,
    pub training_priors: Option<[f64; NUM_CLASSES]>,
    pub flags: Vec<String>,
    pub n_images: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct MetricKey(usize);

impl From<Metric> for MetricKey {
    fn from(m: Metric) -> Self {
        MetricKey(Metric::ALL.iter().position(|x| *x == m).unwrap())
    }
}

/// Arithmetic mean of the defined values.
pub fn mean_of(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

impl MetricsReport {
    pub fn value(&self, metric: Metric, category: Category) -> Option<f64> {
        self.values[&metric.into()][category.index()]
    }

    pub fn row(&self, metric: Metric) -> &[Option<f64>; NUM_CLASSES] {
        &self.values[&metric.into()]
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        mean_of(self.row(metric))
    }

    /// `key=value` lines; undefined values are written as `NA`.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let fmt = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x}"));
        writeln!(out, "images={}", self.n_images).unwrap();
        writeln!(out, "balanced_accuracy={}", self.balanced_accuracy.value).unwrap();
        for metric in Metric::ALL {
            writeln!(out, "{}.mean={}", metric.key(), fmt(self.mean(metric))).unwrap();
            for c in Category::ALL {
                writeln!(out, "{}.{c}={}", metric.key(), fmt(self.value(metric, c))).unwrap();
            }
        }
        for c in Category::ALL {
            writeln!(out, "recall.{c}={}", fmt(self.balanced_accuracy.recalls[c.index()])).unwrap();
        }
        if let Some(priors) = &self.training_priors {
            for c in Category::ALL {
                writeln!(out, "training_prior.{c}={}", priors[c.index()]).unwrap();
            }
        }
        for flag in &self.flags {
            writeln!(out, "flag={flag}").unwrap();
        }
        out
    }

    /// Aligned text table, one metric per row, mean first then categories.
    pub fn to_table(&self) -> String {
        let label_width = Metric::ALL.iter().map(|m| m.label().len()).max().unwrap();
        let mut out = String::new();
        write!(out, "{:<label_width$}  {:>6}", "Metric", "Mean").unwrap();
        for c in Category::ALL {
            write!(out, " {:>6}", c.as_str()).unwrap();
        }
        out.push('\n');
        for metric in Metric::ALL {
            write!(out, "{:<label_width$}  {:>6}", metric.label(), short(self.mean(metric))).unwrap();
            for v in self.row(metric) {
                write!(out, " {:>6}", short(*v)).unwrap();
            }
            out.push('\n');
        }
        writeln!(out, "Balanced multiclass accuracy: {}", short(Some(self.balanced_accuracy.value))).unwrap();
        out
    }
}

/// Three decimals without the leading zero, as in challenge leaderboards.
fn short(v: Option<f64>) -> String {
    match v {
        None => "-".into(),
        Some(x) => {
            let s = format!("{x:.3}");
            s.strip_prefix('0').map(str::to_string).unwrap_or(s)
        }
    }
}

/// Parse the output of [`MetricsReport::to_key_values`] back into numbers.
/// Repeated keys such as `flag` are skipped.
pub fn parse_key_values(text: &str) -> BTreeMap<String, Option<f64>> {
    text.lines()
        .filter_map(|line| line.split_once('='))
        .filter_map(|(k, v)| match v {
            "NA" => Some((k.to_string(), None)),
            _ => v.parse::<f64>().ok().map(|x| (k.to_string(), Some(x))),
        })
        .collect()
}

/// Score aligned predictions against ground truth.
pub fn full_report(
    preds: &PredictionSet,
    truth: &GroundTruthSet,
    counts: Option<&ClassCounts>,
    config: ReportConfig,
) -> Result<MetricsReport> {
    check_aligned(preds, truth)?;
    let balanced = balanced_accuracy(preds, truth)?;
    let mut values: BTreeMap<MetricKey, [Option<f64>; NUM_CLASSES]> =
        Metric::ALL.iter().map(|m| ((*m).into(), [None; NUM_CLASSES])).collect();
    let mut flags = Vec::new();

    for category in Category::ALL {
        let i = category.index();
        let scores = preds.column(category);
        let labels = truth.binary_labels(category);
        let positives = labels.iter().filter(|l| **l).count();
        let mut set = |m: Metric, v: Option<f64>| values.get_mut(&m.into()).unwrap()[i] = v;

        if positives == 0 {
            flags.push(format!("{category} absent from ground truth; AUC and average precision undefined"));
        } else if positives == labels.len() {
            flags.push(format!("{category} is the only class present; AUC undefined"));
        }
        if let Ok(curve) = roc_curve(&scores, &labels) {
            set(Metric::Auc, Some(auc(&curve)));
            set(Metric::AucSens80, Some(auc_above_sensitivity(&curve, config.min_tpr)));
        }
        if positives > 0 {
            set(Metric::AvgPrecision, Some(average_precision(&scores, &labels)?));
        }
        let (_, cm) = binarize(preds, truth, category, config.threshold)?;
        let b = binary_metrics(&cm);
        set(Metric::Accuracy, Some(b.accuracy));
        set(Metric::Sensitivity, Some(b.sensitivity));
        set(Metric::Specificity, Some(b.specificity));
        set(Metric::Dice, Some(b.dice));
        set(Metric::Ppv, Some(b.ppv));
        set(Metric::Npv, Some(b.npv));
    }
    let missing = balanced.missing();
    if !missing.is_empty() {
        let names: Vec<&str> = missing.iter().map(|c| c.as_str()).collect();
        flags.push(format!("balanced accuracy averaged over present categories only (missing: {})", names.join(", ")));
    }

    Ok(MetricsReport {
        values,
        balanced_accuracy: balanced,
        training_priors: counts.map(ClassCounts::priors),
        flags,
        n_images: preds.len(),
    })
}
