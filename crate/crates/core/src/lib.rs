//! Non-neural parts of a dermoscopic skin-lesion classification pipeline:
//! border removal and rescaling, seeded training augmentation and
//! test-time augmentation, class-imbalance weighting and prior rescaling,
//! prediction aggregation, and ISIC-style scoring.

pub mod aggregate;
pub mod augment;
pub mod cli;
pub mod datamodel;
pub mod error;
pub mod imbalance;
pub mod metrics;
pub mod preprocess;
pub mod rng;
pub mod synthetic;
pub mod tensor;

pub use datamodel::{Category, ClassCounts, GroundTruthSet, Manifest, PredictionSet, WeightVector, NUM_CLASSES};
pub use error::{Error, Result};
pub use tensor::ImageTensor;
