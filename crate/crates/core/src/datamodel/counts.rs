use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::category::{Category, NUM_CLASSES};
use crate::error::{Error, Result};

/// Per-class sample counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    counts: [u64; NUM_CLASSES],
}

impl ClassCounts {
    pub fn new(counts: [u64; NUM_CLASSES]) -> Self {
        Self { counts }
    }

    pub fn uniform(n: u64) -> Self {
        Self::new([n; NUM_CLASSES])
    }

    pub fn get(&self, category: Category) -> u64 {
        self.counts[category.index()]
    }

    pub fn as_array(&self) -> &[u64; NUM_CLASSES] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `p(c) = |c| / sum_k |k|`; all zeros when the total is zero.
    pub fn priors(&self) -> [f64; NUM_CLASSES] {
        let total = self.total();
        if total == 0 {
            return [0.0; NUM_CLASSES];
        }
        let total = total as f64;
        self.counts.map(|n| n as f64 / total)
    }

    /// Categories whose count is zero.
    pub fn empty_classes(&self) -> Vec<Category> {
        Category::ALL
            .iter()
            .copied()
            .filter(|c| self.get(*c) == 0)
            .collect()
    }
}

pub fn read_counts<R: Read>(input: R) -> Result<ClassCounts> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?;
    if header.iter().ne(["category", "count"]) {
        return Err(Error::BadHeader {
            expected: "category,count".into(),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut counts = [None; NUM_CLASSES];
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::row(line, "expected 2 fields"));
        }
        let category: Category = record[0].parse().map_err(|_| Error::row(line, format!("unknown category `{}`", &record[0])))?;
        let n: u64 = record[1]
            .trim()
            .parse()
            .map_err(|_| Error::row(line, format!("invalid count `{}`", &record[1])))?;
        if counts[category.index()].replace(n).is_some() {
            return Err(Error::row(line, format!("duplicate category {category}")));
        }
    }
    let mut out = [0; NUM_CLASSES];
    for (slot, (c, v)) in out.iter_mut().zip(Category::ALL.iter().zip(counts)) {
        *slot = v.ok_or_else(|| Error::InvalidArgument(format!("counts file has no row for {c}")))?;
    }
    Ok(ClassCounts::new(out))
}

pub fn parse_counts(path: impl AsRef<Path>) -> Result<ClassCounts> {
    let path = path.as_ref();
    read_counts(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_counts_to<W: Write>(counts: &ClassCounts, mut out: W) -> std::io::Result<()> {
    writeln!(out, "category,count")?;
    for c in Category::ALL {
        writeln!(out, "{c},{}", counts.get(c))?;
    }
    Ok(())
}

pub fn write_counts(counts: &ClassCounts, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_counts_to(counts, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Strictly positive per-class loss weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    weights: [f64; NUM_CLASSES],
}

impl WeightVector {
    pub fn new(weights: [f64; NUM_CLASSES]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("weight vector"));
        }
        if weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::InvalidArgument("weights must be strictly positive".into()));
        }
        Ok(Self { weights })
    }

    pub fn unit() -> Self {
        Self {
            weights: [1.0; NUM_CLASSES],
        }
    }

    pub fn get(&self, category: Category) -> f64 {
        self.weights[category.index()]
    }

    pub fn as_array(&self) -> &[f64; NUM_CLASSES] {
        &self.weights
    }

    /// Rescaled so the weights sum to the number of classes.
    pub fn normalized(&self) -> WeightVector {
        WeightVector {
            weights: normalize_to_len(&self.weights),
        }
    }

    pub fn scaled(&self, k: f64) -> Result<WeightVector> {
        WeightVector::new(self.weights.map(|w| w * k))
    }
}

/// Scale `values` so they sum to their count.
pub(crate) fn normalize_to_len<const N: usize>(values: &[f64; N]) -> [f64; N] {
    let sum: f64 = values.iter().sum();
    values.map(|v| v * N as f64 / sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_sum_to_one() {
        let c = ClassCounts::new([4522, 12875, 3323, 867, 2624, 239, 253, 628, 7417]);
        let s: f64 = c.priors().iter().sum();
        assert!((s - 1.0).abs() <= 1e-12);
        assert_eq!(ClassCounts::uniform(0).priors(), [0.0; 9]);
    }

    #[test]
    fn counts_file_round_trip() {
        let c = ClassCounts::new([1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let mut buf = Vec::new();
        write_counts_to(&c, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("category,count\nMEL,1\nNV,2\n"));
        assert_eq!(read_counts(buf.as_slice()).unwrap(), c);
    }

    #[test]
    fn counts_file_missing_class() {
        let err = read_counts("category,count\nMEL,3\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("no row for NV"), "{err}");
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new([1.0; 9]).is_ok());
        let mut w = [1.0; 9];
        w[3] = 0.0;
        assert!(WeightVector::new(w).is_err());
        w[3] = f64::NAN;
        assert!(WeightVector::new(w).is_err());
        let n = WeightVector::new([2.0; 9]).unwrap().normalized();
        assert_eq!(n, WeightVector::unit());
    }
}
