//! Class-imbalance handling: loss weights, weighted cross-entropy, prior
//! rescaling of network outputs, random oversampling and stratified
//! splitting.

mod loss;
mod rescale;
mod sampling;
mod weights;

pub use loss::{cross_entropy, logsumexp, weighted_cross_entropy};
pub use rescale::prior_rescale;
pub use sampling::{oversample_manifest, split_manifest, validation_count};
pub use weights::{effective_number, effective_weights, inverse_frequency, inverse_frequency_weights};
