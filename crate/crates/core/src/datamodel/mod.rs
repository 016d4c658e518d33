//! Category taxonomy, prediction/ground-truth/manifest types and their file
//! formats.

mod category;
mod counts;
mod manifest;
mod predictions;
mod truth;

/// Name of the image id column in prediction and ground-truth files.
pub const ID_COLUMN: &str = "image";

pub use category::{csv_header, Category, NUM_CLASSES};
pub use counts::{parse_counts, read_counts, write_counts, write_counts_to, ClassCounts, WeightVector};
pub(crate) use counts::normalize_to_len;
pub use manifest::{
    parse_manifest, read_manifest, write_manifest, write_manifest_to, Manifest, ManifestRecord, Split,
    MANIFEST_HEADER,
};
pub use predictions::{
    normalize_row, parse_predictions, read_predictions, write_predictions, write_predictions_to, PredictionSet,
    ScoreRow,
};
pub use truth::{align, parse_ground_truth, read_ground_truth, write_ground_truth, GroundTruthSet};
