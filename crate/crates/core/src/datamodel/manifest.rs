use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::category::{Category, NUM_CLASSES};
use super::counts::ClassCounts;
use crate::error::{Error, Result};

pub const MANIFEST_HEADER: [&str; 4] = ["path", "source", "label", "split"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Split {
    Train,
    Valid,
    #[default]
    None,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::None => "none",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "none" | "" => Ok(Split::None),
            other => Err(Error::InvalidArgument(format!("unknown split `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRecord {
    pub path: String,
    pub source: String,
    pub label: Category,
    pub split: Split,
}

impl ManifestRecord {
    pub fn new(path: impl Into<String>, source: impl Into<String>, label: Category) -> Self {
        Self {
            path: path.into(),
            source: source.into(),
            label,
            split: Split::None,
        }
    }

    /// File stem of the image path, used as the image id.
    pub fn image_id(&self) -> &str {
        Path::new(&self.path)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&self.path)
    }
}

/// Dataset records driving preprocessing, splitting and oversampling.
///
/// Paths are unique, except that a record outside the validation split may
/// be repeated verbatim: that is how oversampled copies are represented.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn new(records: Vec<ManifestRecord>) -> Result<Self> {
        let mut first: HashMap<&str, &ManifestRecord> = HashMap::with_capacity(records.len());
        for r in &records {
            if let Some(prev) = first.insert(r.path.as_str(), r) {
                let is_copy = prev == r && r.split != Split::Valid;
                if !is_copy {
                    return Err(Error::InvalidArgument(format!("duplicate manifest path `{}`", r.path)));
                }
            }
        }
        Ok(Self { records })
    }

    pub(crate) fn from_records_unchecked(records: Vec<ManifestRecord>) -> Self {
        Self { records }
    }

    pub fn records(&self) -> &[ManifestRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<ManifestRecord> {
        self.records
    }

    /// Per-class counts over records in `split`, or over all records when
    /// `split` is `None`.
    pub fn class_counts(&self, split: Option<Split>) -> ClassCounts {
        let mut counts = [0u64; NUM_CLASSES];
        for r in self.records.iter().filter(|r| split.is_none_or(|s| r.split == s)) {
            counts[r.label.index()] += 1;
        }
        ClassCounts::new(counts)
    }

    pub fn split_sizes(&self) -> (usize, usize, usize) {
        let mut sizes = (0, 0, 0);
        for r in &self.records {
            match r.split {
                Split::Train => sizes.0 += 1,
                Split::Valid => sizes.1 += 1,
                Split::None => sizes.2 += 1,
            }
        }
        sizes
    }
}

pub fn read_manifest<R: Read>(input: R) -> Result<Manifest> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?;
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(Error::BadHeader {
            expected: MANIFEST_HEADER.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(Error::row(line, "expected 4 fields"));
        }
        if record[0].is_empty() {
            return Err(Error::row(line, "empty path"));
        }
        let label = record[2]
            .parse()
            .map_err(|_| Error::row(line, format!("unknown label `{}`", &record[2])))?;
        let split = record[3]
            .parse()
            .map_err(|_| Error::row(line, format!("unknown split `{}`", &record[3])))?;
        records.push(ManifestRecord {
            path: record[0].to_string(),
            source: record[1].to_string(),
            label,
            split,
        });
    }
    Manifest::new(records)
}

pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    read_manifest(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_manifest_to<W: Write>(manifest: &Manifest, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(MANIFEST_HEADER)?;
    for r in &manifest.records {
        writer.write_record([r.path.as_str(), r.source.as_str(), r.label.as_str(), r.split.as_str()])?;
    }
    writer.flush().map_err(|e| Error::io("<manifest>", e))?;
    Ok(())
}

pub fn write_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_manifest_to(manifest, std::io::BufWriter::new(file))
}
