use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::category::Category;
use super::predictions::{check_header, check_unique, csv_reader, parse_scored_record, PredictionSet};
use crate::error::{Error, Result};

/// Reference labels, one category per image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthSet {
    ids: Vec<String>,
    labels: Vec<Category>,
}

impl GroundTruthSet {
    pub fn new(ids: Vec<String>, labels: Vec<Category>) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} image ids but {} labels",
                ids.len(),
                labels.len()
            )));
        }
        check_unique(&ids)?;
        Ok(Self { ids, labels })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[Category] {
        &self.labels
    }

    pub fn label_of(&self, id: &str) -> Option<Category> {
        self.ids.iter().position(|i| i == id).map(|p| self.labels[p])
    }

    /// One-vs-rest labels for `category`.
    pub fn binary_labels(&self, category: Category) -> Vec<bool> {
        self.labels.iter().map(|l| *l == category).collect()
    }

    /// Number of images per category.
    pub fn class_counts(&self) -> super::ClassCounts {
        let mut counts = [0u64; super::NUM_CLASSES];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        super::ClassCounts::new(counts)
    }
}

pub fn read_ground_truth<R: Read>(input: R) -> Result<GroundTruthSet> {
    let mut reader = csv_reader(input);
    check_header(&mut reader)?;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let (id, row) = parse_scored_record(&record, line)?;
        let ones: Vec<usize> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 1.0)
            .map(|(i, _)| i)
            .collect();
        let zeros = row.iter().filter(|v| **v == 0.0).count();
        if ones.len() != 1 || zeros != row.len() - 1 {
            return Err(Error::row(line, "not one-hot"));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        ids.push(id);
        labels.push(Category::ALL[ones[0]]);
    }
    Ok(GroundTruthSet { ids, labels })
}

pub fn parse_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruthSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_ground_truth(file)
}

/// Write labels as one-hot rows in the prediction layout.
pub fn write_ground_truth(truth: &GroundTruthSet, path: impl AsRef<Path>) -> Result<()> {
    let rows = truth
        .labels
        .iter()
        .map(|l| {
            let mut r = [0.0; super::NUM_CLASSES];
            r[l.index()] = 1.0;
            r
        })
        .collect();
    let as_preds = PredictionSet::new(truth.ids.clone(), rows)?;
    super::write_predictions(&as_preds, path)
}

/// Reorder `preds` to the id order of `truth`. Fails listing every id that
/// is present on only one side.
pub fn align(preds: &PredictionSet, truth: &GroundTruthSet) -> Result<(PredictionSet, GroundTruthSet)> {
    let pred_ids: HashSet<&str> = preds.ids().iter().map(String::as_str).collect();
    let truth_ids: HashSet<&str> = truth.ids.iter().map(String::as_str).collect();
    let missing_in_predictions: Vec<String> = truth
        .ids
        .iter()
        .filter(|id| !pred_ids.contains(id.as_str()))
        .cloned()
        .collect();
    let missing_in_truth: Vec<String> = preds
        .ids()
        .iter()
        .filter(|id| !truth_ids.contains(id.as_str()))
        .cloned()
        .collect();
    if !missing_in_predictions.is_empty() || !missing_in_truth.is_empty() {
        return Err(Error::IdMismatch {
            missing_in_predictions,
            missing_in_truth,
        });
    }
    Ok((preds.reordered(&truth.ids), truth.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "image,MEL,NV,BCC,AK,BKL,DF,VASC,SCC,UNK\n";

    #[test]
    fn nv_row() {
        let t = read_ground_truth(format!("{HEADER}img1,0,1,0,0,0,0,0,0,0\n").as_bytes()).unwrap();
        assert_eq!(t.labels(), &[Category::Nv]);
    }

    #[test]
    fn two_ones_rejected() {
        let err = read_ground_truth(format!("{HEADER}img1,1,1,0,0,0,0,0,0,0\n").as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "not one-hot at row 2");
        let err = read_ground_truth(format!("{HEADER}img1,0.5,0,0,0,0,0,0,0,0\n").as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "not one-hot at row 2");
    }

    #[test]
    fn unknown_column_rejected() {
        let err = read_ground_truth("image,MEL,NV,BCC,AK,BKL,DF,VASC,SCC,OTHER\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::BadHeader { .. }));
    }

    #[test]
    fn enumeration_of_all_classes() {
        let mut text = HEADER.to_string();
        for i in 0..9 {
            let cells: Vec<&str> = (0..9).map(|j| if i == j { "1.0" } else { "0.0" }).collect();
            text.push_str(&format!("id{i},{}\n", cells.join(",")));
        }
        let t = read_ground_truth(text.as_bytes()).unwrap();
        assert_eq!(t.labels(), &Category::ALL);
    }

    fn preds(ids: &[&str]) -> PredictionSet {
        let rows = ids
            .iter()
            .enumerate()
            .map(|(i, _)| std::array::from_fn(|j| (i * 9 + j) as f64))
            .collect();
        PredictionSet::new(ids.iter().map(|s| s.to_string()).collect(), rows).unwrap()
    }

    fn truth(ids: &[&str]) -> GroundTruthSet {
        GroundTruthSet::new(
            ids.iter().map(|s| s.to_string()).collect(),
            ids.iter().enumerate().map(|(i, _)| Category::ALL[i % 9]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn align_reorders_rows() {
        let p = preds(&["c", "a", "b"]);
        let t = truth(&["a", "b", "c"]);
        let (ap, at) = align(&p, &t).unwrap();
        assert_eq!(ap.ids(), t.ids());
        assert_eq!(at, t);
        for (id, row) in ap.iter() {
            let orig = p.ids().iter().position(|x| x == id).unwrap();
            assert_eq!(row, p.row(orig));
        }
    }

    #[test]
    fn align_identity_when_already_aligned() {
        let p = preds(&["a", "b"]);
        let (ap, _) = align(&p, &truth(&["a", "b"])).unwrap();
        assert_eq!(ap, p);
    }

    #[test]
    fn align_lists_missing_ids() {
        let err = align(&preds(&["a", "x"]), &truth(&["a", "b", "c"])).unwrap_err();
        match err {
            Error::IdMismatch {
                missing_in_predictions,
                missing_in_truth,
            } => {
                assert_eq!(missing_in_predictions, ["b", "c"]);
                assert_eq!(missing_in_truth, ["x"]);
            }
            other => panic!("{other}"),
        }
    }
}
