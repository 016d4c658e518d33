use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::category::{csv_header, Category, NUM_CLASSES};
use crate::error::{Error, Result};

/// One row of class confidences in canonical category order.
pub type ScoreRow = [f64; NUM_CLASSES];

/// Per-image class confidences keyed by image id.
///
/// Entries are non-negative and finite. Rows are not required to sum to one
/// until [`PredictionSet::normalize_rows`] has been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    ids: Vec<String>,
    rows: Vec<ScoreRow>,
}

impl PredictionSet {
    pub fn new(ids: Vec<String>, rows: Vec<ScoreRow>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::InvalidArgument(format!(
                "{} image ids but {} rows",
                ids.len(),
                rows.len()
            )));
        }
        check_unique(&ids)?;
        for (i, row) in rows.iter().enumerate() {
            if let Some(msg) = row_problem(row) {
                return Err(Error::InvalidArgument(format!("{msg} for `{}`", ids[i])));
            }
        }
        Ok(Self { ids, rows })
    }

    pub fn empty() -> Self {
        Self {
            ids: Vec::new(),
            rows: Vec::new(),
        }
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

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &ScoreRow {
        &self.rows[index]
    }

    /// Confidences for one category across all images.
    pub fn column(&self, category: Category) -> Vec<f64> {
        self.rows.iter().map(|r| r[category.index()]).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ScoreRow)> {
        self.ids.iter().map(String::as_str).zip(self.rows.iter())
    }

    /// Divide each row by its sum.
    pub fn normalize_rows(&self) -> Result<PredictionSet> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for (index, row) in self.rows.iter().enumerate() {
            match normalize_row(row) {
                Some(r) => rows.push(r),
                None => {
                    return Err(Error::ZeroRow {
                        index,
                        id: self.ids[index].clone(),
                    })
                }
            }
        }
        Ok(PredictionSet {
            ids: self.ids.clone(),
            rows,
        })
    }

    /// Returns a copy with rows in the order of `order`, which must be a
    /// permutation of the current ids.
    pub(crate) fn reordered(&self, order: &[String]) -> PredictionSet {
        let pos: std::collections::HashMap<&str, usize> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let rows = order.iter().map(|id| self.rows[pos[id.as_str()]]).collect();
        PredictionSet {
            ids: order.to_vec(),
            rows,
        }
    }

    pub(crate) fn with_rows(&self, rows: Vec<ScoreRow>) -> PredictionSet {
        debug_assert_eq!(rows.len(), self.ids.len());
        PredictionSet {
            ids: self.ids.clone(),
            rows,
        }
    }
}

/// Scale a row so it sums to one. `None` when the sum is not positive.
pub fn normalize_row<const N: usize>(row: &[f64; N]) -> Option<[f64; N]> {
    let sum: f64 = row.iter().sum();
    if sum.is_nan() || sum <= 0.0 || sum.is_infinite() {
        return None;
    }
    let mut out = [0.0; N];
    for (o, v) in out.iter_mut().zip(row) {
        *o = v / sum;
    }
    Some(out)
}

fn row_problem(row: &ScoreRow) -> Option<&'static str> {
    if row.iter().any(|v| !v.is_finite()) {
        Some("non-finite confidence")
    } else if row.iter().any(|v| *v < 0.0) {
        Some("negative confidence")
    } else {
        None
    }
}

pub(crate) fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

pub(crate) fn check_header<R: Read>(reader: &mut csv::Reader<R>) -> Result<()> {
    let expected = csv_header();
    let found = reader.headers()?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(Error::BadHeader {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

pub(crate) fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

/// Parse one record into an id and nine numbers. `line` is the 1-based file
/// line used in error messages.
pub(crate) fn parse_scored_record(record: &csv::StringRecord, line: u64) -> Result<(String, ScoreRow)> {
    if record.len() != NUM_CLASSES + 1 {
        return Err(Error::row(
            line,
            format!("expected {} fields, found {}", NUM_CLASSES + 1, record.len()),
        ));
    }
    let id = record[0].to_string();
    if id.is_empty() {
        return Err(Error::row(line, "missing image id"));
    }
    let mut row = [0.0; NUM_CLASSES];
    for (slot, field) in row.iter_mut().zip(record.iter().skip(1)) {
        *slot = field
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::row(line, format!("non-numeric value `{field}`")))?;
    }
    Ok((id, row))
}

pub fn read_predictions<R: Read>(input: R) -> Result<PredictionSet> {
    let mut reader = csv_reader(input);
    check_header(&mut reader)?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let (id, row) = parse_scored_record(&record, line)?;
        if let Some(msg) = row_problem(&row) {
            return Err(Error::row(line, msg));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        ids.push(id);
        rows.push(row);
    }
    Ok(PredictionSet { ids, rows })
}

pub fn parse_predictions(path: impl AsRef<Path>) -> Result<PredictionSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(file)
}

/// Write in the challenge submission layout. `f64` values use the shortest
/// representation that parses back to the identical bit pattern.
pub fn write_predictions_to<W: Write>(preds: &PredictionSet, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(csv_header())?;
    let mut fields = Vec::with_capacity(NUM_CLASSES + 1);
    for (id, row) in preds.iter() {
        fields.clear();
        fields.push(id.to_string());
        fields.extend(row.iter().map(|v| format!("{v}")));
        writer.write_record(&fields)?;
    }
    writer.flush().map_err(|e| Error::io("<predictions>", e))?;
    Ok(())
}

pub fn write_predictions(preds: &PredictionSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_predictions_to(preds, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "image,MEL,NV,BCC,AK,BKL,DF,VASC,SCC,UNK\n";

    fn parse_str(s: &str) -> Result<PredictionSet> {
        read_predictions(s.as_bytes())
    }

    #[test]
    fn one_hot_row() {
        let p = parse_str(&format!("{HEADER}ISIC_0000000,1,0,0,0,0,0,0,0,0\n")).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.ids()[0], "ISIC_0000000");
        assert_eq!(p.row(0)[Category::Mel.index()], 1.0);
        assert_eq!(p.row(0).iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn negative_value_reports_row() {
        let err = parse_str(&format!("{HEADER}a,-0.1,0,0,0,0,0,0,0,0\n")).unwrap_err();
        assert_eq!(err.to_string(), "negative confidence at row 2");
    }

    #[test]
    fn non_finite_and_non_numeric_rejected() {
        let err = parse_str(&format!("{HEADER}a,0,0,0,0,0,0,0,0,0\nb,inf,0,0,0,0,0,0,0,0\n")).unwrap_err();
        assert_eq!(err.to_string(), "non-finite confidence at row 3");
        let err = parse_str(&format!("{HEADER}a,x,0,0,0,0,0,0,0,0\n")).unwrap_err();
        assert!(err.to_string().contains("non-numeric"), "{err}");
        assert!(err.to_string().ends_with("row 2"), "{err}");
    }

    #[test]
    fn duplicate_id_named() {
        let body = "a,1,0,0,0,0,0,0,0,0\nb,0,1,0,0,0,0,0,0,0\na,0,0,1,0,0,0,0,0,0\n";
        let err = parse_str(&format!("{HEADER}{body}")).unwrap_err();
        assert!(matches!(&err, Error::DuplicateId(id) if id == "a"), "{err}");
    }

    #[test]
    fn wrong_column_order_rejected() {
        let err = parse_str("image,NV,MEL,BCC,AK,BKL,DF,VASC,SCC,UNK\na,1,0,0,0,0,0,0,0,0\n").unwrap_err();
        assert!(matches!(err, Error::BadHeader { .. }));
        let err = parse_str("image,MEL,NV\na,1,0\n").unwrap_err();
        assert!(matches!(err, Error::BadHeader { .. }));
    }

    #[test]
    fn missing_id_and_arity() {
        let err = parse_str(&format!("{HEADER},1,0,0,0,0,0,0,0,0\n")).unwrap_err();
        assert_eq!(err.to_string(), "missing image id at row 2");
        let err = parse_str(&format!("{HEADER}a,1,0,0\n")).unwrap_err();
        assert!(err.to_string().contains("expected 10 fields"));
    }

    #[test]
    fn one_hot_write_text() {
        let mut row = [0.0; 9];
        row[0] = 1.0;
        let p = PredictionSet::new(vec!["x".into()], vec![row]).unwrap();
        let mut buf = Vec::new();
        write_predictions_to(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), format!("{HEADER}x,1,0,0,0,0,0,0,0,0\n"));
        assert_eq!(read_predictions(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn empty_set_is_header_only() {
        let mut buf = Vec::new();
        write_predictions_to(&PredictionSet::empty(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), HEADER);
        assert!(read_predictions(buf.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn random_matrix_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ids: Vec<String> = (0..50).map(|i| format!("ISIC_{i:07}")).collect();
        let rows: Vec<ScoreRow> = (0..50)
            .map(|_| std::array::from_fn(|_| rng.gen::<f64>() * 10.0))
            .collect();
        let p = PredictionSet::new(ids, rows).unwrap();
        let mut buf = Vec::new();
        write_predictions_to(&p, &mut buf).unwrap();
        let q = read_predictions(buf.as_slice()).unwrap();
        let max_diff = p
            .rows()
            .iter()
            .zip(q.rows())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        assert!(max_diff <= 1e-12);
        assert_eq!(p.ids(), q.ids());
    }

    #[test]
    fn normalize_examples() {
        let mut row = [0.0; 9];
        row[0] = 2.0;
        let p = PredictionSet::new(vec!["a".into(), "b".into()], vec![row, [1.0; 9]]).unwrap();
        let n = p.normalize_rows().unwrap();
        assert_eq!(n.row(0)[0], 1.0);
        assert!(n.row(0)[1..].iter().all(|v| *v == 0.0));
        for v in n.row(1) {
            assert!((v - 1.0 / 9.0).abs() < 1e-15);
        }
        // two-class reduction; 0.6667 is 2/3 rounded
        let two = normalize_row(&[2.0 / 3.0, 2.0]).unwrap();
        assert!((two[0] - 0.25).abs() < 1e-12 && (two[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_zero_row() {
        let p = PredictionSet::new(vec!["z".into()], vec![[0.0; 9]]).unwrap();
        assert!(matches!(p.normalize_rows(), Err(Error::ZeroRow { index: 0, .. })));
    }

    fn arb_row() -> impl Strategy<Value = ScoreRow> {
        proptest::array::uniform9(0.0f64..1e3).prop_filter("positive sum", |r| r.iter().sum::<f64>() > 1e-6)
    }

    fn argmax(row: &ScoreRow) -> usize {
        let mut best = 0;
        for i in 1..row.len() {
            if row[i] > row[best] {
                best = i;
            }
        }
        best
    }

    proptest! {
        #[test]
        fn normalize_idempotent_and_argmax_preserving(rows in proptest::collection::vec(arb_row(), 1..20)) {
            let ids = (0..rows.len()).map(|i| i.to_string()).collect();
            let p = PredictionSet::new(ids, rows).unwrap();
            let once = p.normalize_rows().unwrap();
            let twice = once.normalize_rows().unwrap();
            for ((a, b), orig) in once.rows().iter().zip(twice.rows()).zip(p.rows()) {
                prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
                prop_assert_eq!(argmax(a), argmax(orig));
            }
        }

        #[test]
        fn write_parse_round_trip(rows in proptest::collection::vec(proptest::array::uniform9(0.0f64..1e6), 0..30)) {
            let ids = (0..rows.len()).map(|i| format!("img{i}")).collect();
            let p = PredictionSet::new(ids, rows).unwrap();
            let mut buf = Vec::new();
            write_predictions_to(&p, &mut buf).unwrap();
            prop_assert_eq!(read_predictions(buf.as_slice()).unwrap(), p);
        }
    }
}
