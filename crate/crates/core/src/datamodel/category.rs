use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Number of diagnostic categories.
pub const NUM_CLASSES: usize = 9;

/// Diagnostic category. The declaration order is the canonical column order
/// used by every file, vector and report in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    /// Melanoma
    Mel,
    /// Melanocytic nevus
    Nv,
    /// Basal cell carcinoma
    Bcc,
    /// Actinic keratosis
    Ak,
    /// Benign keratosis
    Bkl,
    /// Dermatofibroma
    Df,
    /// Vascular lesion
    Vasc,
    /// Squamous cell carcinoma
    Scc,
    /// None of the others
    Unk,
}

impl Category {
    pub const ALL: [Category; NUM_CLASSES] = [
        Category::Mel,
        Category::Nv,
        Category::Bcc,
        Category::Ak,
        Category::Bkl,
        Category::Df,
        Category::Vasc,
        Category::Scc,
        Category::Unk,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Category> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Mel => "MEL",
            Category::Nv => "NV",
            Category::Bcc => "BCC",
            Category::Ak => "AK",
            Category::Bkl => "BKL",
            Category::Df => "DF",
            Category::Vasc => "VASC",
            Category::Scc => "SCC",
            Category::Unk => "UNK",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown category `{s}`")))
    }
}

/// Header shared by prediction and ground-truth files.
pub fn csv_header() -> Vec<&'static str> {
    std::iter::once(super::ID_COLUMN)
        .chain(Category::ALL.iter().map(|c| c.as_str()))
        .collect()
}
