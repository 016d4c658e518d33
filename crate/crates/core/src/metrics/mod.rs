//! ISIC-style scoring: ROC curves and AUC, partial AUC above a sensitivity
//! floor, interpolated average precision, one-vs-rest threshold metrics and
//! balanced multiclass accuracy.

mod confusion;
mod precision;
mod report;
mod roc;

pub use confusion::{argmax, balanced_accuracy, binarize, binary_metrics, BalancedAccuracy, BinaryMetrics, ConfusionCounts};
pub use precision::average_precision;
pub use report::{full_report, mean_of, parse_key_values, Metric, MetricsReport, ReportConfig};
pub use roc::{auc, auc_above_sensitivity, roc_curve, sensitivity_crossing, RocCurve, RocPoint};
