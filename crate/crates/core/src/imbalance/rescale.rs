use crate::datamodel::{ClassCounts, PredictionSet, ScoreRow, NUM_CLASSES};
use crate::error::{Error, Result};

/// Divide each confidence by its class prior `p(c) = |c| / sum_k |k|` and
/// renormalize each row.
///
/// A class with zero prior is allowed only if it never receives a nonzero
/// confidence; its entries stay zero.
pub fn prior_rescale(preds: &PredictionSet, counts: &ClassCounts) -> Result<PredictionSet> {
    let priors = counts.priors();
    if counts.total() == 0 {
        return Err(Error::Empty("class counts"));
    }
    let mut rows: Vec<ScoreRow> = Vec::with_capacity(preds.len());
    for row in preds.rows() {
        let mut scaled = [0.0; NUM_CLASSES];
        for (c, (&v, &p)) in row.iter().zip(&priors).enumerate() {
            if p == 0.0 {
                if v != 0.0 {
                    return Err(Error::ZeroPrior(crate::Category::ALL[c]));
                }
            } else {
                scaled[c] = v / p;
            }
        }
        rows.push(scaled);
    }
    preds.with_rows(rows).normalize_rows()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Category;

    fn set(rows: Vec<ScoreRow>) -> PredictionSet {
        PredictionSet::new((0..rows.len()).map(|i| i.to_string()).collect(), rows).unwrap()
    }

    #[test]
    fn uniform_priors_identity() {
        let row = [0.1, 0.2, 0.05, 0.05, 0.1, 0.1, 0.1, 0.2, 0.1];
        let p = set(vec![row]);
        let out = prior_rescale(&p, &ClassCounts::uniform(17)).unwrap();
        for (a, b) in out.row(0).iter().zip(row) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn two_class_example() {
        let mut row = [0.0; 9];
        row[0] = 0.5;
        row[1] = 0.5;
        let mut counts = [0; 9];
        counts[0] = 750;
        counts[1] = 250;
        let out = prior_rescale(&set(vec![row]), &ClassCounts::new(counts)).unwrap();
        assert!((out.row(0)[0] - 0.25).abs() <= 1e-12);
        assert!((out.row(0)[1] - 0.75).abs() <= 1e-12);
    }

    #[test]
    fn one_hot_unchanged() {
        let mut row = [0.0; 9];
        row[Category::Df.index()] = 1.0;
        let counts = ClassCounts::new([4522, 12875, 3323, 867, 2624, 239, 253, 628, 7417]);
        let out = prior_rescale(&set(vec![row]), &counts).unwrap();
        assert_eq!(out.row(0), &row);
    }

    #[test]
    fn zero_prior_with_mass_rejected() {
        let mut counts = [10; 9];
        counts[8] = 0;
        let err = prior_rescale(&set(vec![[0.1; 9]]), &ClassCounts::new(counts)).unwrap_err();
        assert!(matches!(err, Error::ZeroPrior(Category::Unk)));
    }

    #[test]
    fn uniform_rescale_after_rescale_is_noop() {
        let counts = ClassCounts::new([4522, 12875, 3323, 867, 2624, 239, 253, 628, 7417]);
        let p = set(vec![[0.3, 0.1, 0.05, 0.05, 0.2, 0.1, 0.05, 0.05, 0.1]]);
        let once = prior_rescale(&p, &counts).unwrap();
        let again = prior_rescale(&once, &ClassCounts::uniform(3)).unwrap();
        for (a, b) in once.row(0).iter().zip(again.row(0)) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}
