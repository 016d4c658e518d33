use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::augment::AugmentationPolicy;
use crate::error::{Error, Result};
use crate::rng::sha256_hex;

/// Run configuration read from a TOML file. Augmentation keys use the
/// fastai parameter names (`max_rotate`, `p_affine`, ...).
///
/// ```toml
/// seed = 42
///
/// [augment]
/// crop_pad_size = 224
/// max_rotate = 45
///
/// [preprocess]
/// target_short_side = 450
/// bottom_crop = { sd198 = 0.1 }
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub augment: Option<AugmentationPolicy>,
    pub preprocess: PreprocessSection,
    pub imbalance: ImbalanceSection,
    pub tta: TtaSection,
    pub infer: InferSection,
    pub metrics: MetricsSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    pub threshold: f64,
    pub min_keep: f64,
    pub target_short_side: Option<u32>,
    pub bottom_crop: BTreeMap<String, f64>,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        Self {
            threshold: crate::preprocess::DEFAULT_THRESHOLD,
            min_keep: crate::preprocess::DEFAULT_MIN_KEEP,
            target_short_side: None,
            bottom_crop: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImbalanceSection {
    pub beta: f64,
    pub valid_fraction: f64,
}

impl Default for ImbalanceSection {
    fn default() -> Self {
        Self {
            beta: 0.999,
            valid_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TtaSection {
    pub beta: f64,
    pub scale: f64,
    pub crop_size: Option<u32>,
}

impl Default for TtaSection {
    fn default() -> Self {
        Self {
            beta: 0.4,
            scale: crate::augment::TTA_SCALE,
            crop_size: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferSection {
    pub timeout_secs: f64,
}

impl Default for InferSection {
    fn default() -> Self {
        Self { timeout_secs: 30.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub threshold: f64,
    pub min_tpr: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            min_tpr: 0.8,
        }
    }
}

/// A parsed config together with the SHA-256 of the file it came from.
#[derive(Debug, Clone, Default)]
pub struct LoadedConfig {
    pub config: Config,
    pub digest: Option<String>,
}

impl LoadedConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(policy) = &config.augment {
            policy.validate()?;
        }
        Ok(Self {
            config,
            digest: Some(sha256_hex(&bytes)),
        })
    }
}
