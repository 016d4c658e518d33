//! Seeded training augmentation and deterministic test-time views.

mod policy;
mod preview;
mod transform;
mod tta;

pub use policy::{sample_transform, AugmentationPolicy, CutoutRect, TransformSample};
pub use preview::contact_sheet;
pub use transform::{apply_cutout, apply_transform};
pub use tta::{corner_origins, tta_variants, TTA_SCALE, TTA_VARIANTS};
