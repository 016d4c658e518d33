mod common;

use common::*;
use lesion_core::metrics::*;
use lesion_core::{Category, GroundTruthSet, PredictionSet};
use proptest::prelude::*;

fn binary_problem() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..200, 1u32..50).prop_flat_map(|(n, levels)| {
        (
            proptest::collection::vec((0..levels).prop_map(move |v| v as f64 / levels as f64), n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(s, mut l)| {
                l[0] = true;
                l[1] = false;
                (s, l)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auc_equals_pair_statistic((scores, labels) in binary_problem()) {
        let curve = roc_curve(&scores, &labels).unwrap();
        prop_assert!((auc(&curve) - pair_auc(&scores, &labels)).abs() <= 1e-9);
    }

    #[test]
    fn ap_equals_threshold_sweep((scores, labels) in binary_problem()) {
        let ap = average_precision(&scores, &labels).unwrap();
        prop_assert!((ap - brute_average_precision(&scores, &labels)).abs() <= 1e-9);
    }

    #[test]
    fn partial_auc_bounded_and_matches((scores, labels) in binary_problem()) {
        let curve = roc_curve(&scores, &labels).unwrap();
        let p = auc_above_sensitivity(&curve, 0.8);
        prop_assert!(p <= auc(&curve) + 1e-12);
        prop_assert!(p >= 0.0);
        prop_assert!((p - brute_partial_auc(&scores, &labels, 0.8)).abs() <= 1e-9);
    }

    #[test]
    fn roc_matches_direct_counts((scores, labels) in binary_problem()) {
        let curve = roc_curve(&scores, &labels).unwrap();
        let pts: Vec<(f64, f64)> = curve.points().iter().map(|p| (p.fpr, p.tpr)).collect();
        let expected = brute_roc(&scores, &labels);
        prop_assert_eq!(pts.len(), expected.len());
        for (a, b) in pts.iter().zip(&expected) {
            prop_assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn auc_invariant_under_monotone_transform((scores, labels) in binary_problem()) {
        let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
        let a = auc(&roc_curve(&scores, &labels).unwrap());
        let b = auc(&roc_curve(&warped, &labels).unwrap());
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn accuracy_identity(tp in 0u64..500, fp in 0u64..500, tn in 0u64..500, fn_ in 0u64..500) {
        prop_assume!(tp + fp + tn + fn_ > 0);
        let m = binary_metrics(&ConfusionCounts::new(tp, fp, tn, fn_));
        let direct = (tp + tn) as f64 / (tp + fp + tn + fn_) as f64;
        prop_assert!((m.accuracy - direct).abs() <= 1e-12);
        let b = brute_binary((tp, fp, tn, fn_));
        for (x, y) in [m.accuracy, m.sensitivity, m.specificity, m.dice, m.ppv, m.npv].iter().zip(b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn balanced_accuracy_invariant_under_monotone_transform(
        rows in proptest::collection::vec(proptest::array::uniform9(0.0f64..1.0), 1..60),
        labels in proptest::collection::vec(0usize..9, 60),
    ) {
        let ids: Vec<String> = (0..rows.len()).map(|i| i.to_string()).collect();
        let truth = GroundTruthSet::new(ids.clone(), labels[..rows.len()].iter().map(|i| Category::ALL[*i]).collect()).unwrap();
        let preds = PredictionSet::new(ids.clone(), rows.clone()).unwrap();
        let warped = PredictionSet::new(ids, rows.iter().map(|r| r.map(|v| v.sqrt() * 4.0 + 1.0)).collect()).unwrap();
        let a = balanced_accuracy(&preds, &truth).unwrap().value;
        let b = balanced_accuracy(&warped, &truth).unwrap().value;
        prop_assert_eq!(a, b);
        prop_assert!((a - brute_balanced_accuracy(&preds, &truth)).abs() <= 1e-12);
    }
}

#[test]
fn report_mean_column_is_mean_of_categories() {
    let mut rng = TestRng::new(11);
    let n = 120;
    let ids: Vec<String> = (0..n).map(|i| format!("img{i}")).collect();
    let labels: Vec<Category> = (0..n).map(|i| Category::ALL[i % 9]).collect();
    let rows = (0..n).map(|_| std::array::from_fn(|_| rng.unit())).collect();
    let preds = PredictionSet::new(ids.clone(), rows).unwrap().normalize_rows().unwrap();
    let truth = GroundTruthSet::new(ids, labels).unwrap();
    let report = full_report(&preds, &truth, None, ReportConfig::default()).unwrap();
    for m in Metric::ALL {
        let cells: Vec<f64> = report.row(m).iter().map(|v| v.unwrap()).collect();
        let mean = cells.iter().sum::<f64>() / 9.0;
        assert!((report.mean(m).unwrap() - mean).abs() <= 1e-9);
        assert!(cells.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
