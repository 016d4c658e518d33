use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng::{bernoulli, int_inclusive, keyed_rng, uniform};

/// Bounds for random training augmentation. Field names follow the usual
/// fastai `get_transforms` / `cutout` parameter names.
///
/// `crop_pad_size` has no default: the output resolution depends on the
/// model and must be given.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationPolicy {
    /// Degrees.
    #[serde(default = "d::max_rotate")]
    pub max_rotate: f64,
    #[serde(default = "d::half")]
    pub p_affine: f64,
    #[serde(default = "d::yes")]
    pub do_flip: bool,
    #[serde(default = "d::yes")]
    pub flip_vert: bool,
    #[serde(default = "d::max_zoom")]
    pub max_zoom: f64,
    #[serde(default = "d::max_lighting")]
    pub max_lighting: f64,
    /// Horizontal shear factor bound.
    #[serde(default)]
    pub max_shear: f64,
    /// Side of the square output.
    pub crop_pad_size: u32,
    #[serde(default = "d::holes")]
    pub cutout_holes: (u32, u32),
    #[serde(default = "d::length")]
    pub cutout_length: (u32, u32),
    #[serde(default = "d::half")]
    pub cutout_p: f64,
}

mod d {
    pub fn max_rotate() -> f64 {
        45.0
    }
    pub fn half() -> f64 {
        0.5
    }
    pub fn yes() -> bool {
        true
    }
    pub fn max_zoom() -> f64 {
        1.05
    }
    pub fn max_lighting() -> f64 {
        0.2
    }
    pub fn holes() -> (u32, u32) {
        (1, 1)
    }
    pub fn length() -> (u32, u32) {
        (16, 16)
    }
}

impl AugmentationPolicy {
    pub fn new(crop_pad_size: u32) -> Self {
        Self {
            max_rotate: d::max_rotate(),
            p_affine: d::half(),
            do_flip: true,
            flip_vert: true,
            max_zoom: d::max_zoom(),
            max_lighting: d::max_lighting(),
            max_shear: 0.0,
            crop_pad_size,
            cutout_holes: d::holes(),
            cutout_length: d::length(),
            cutout_p: d::half(),
        }
    }

    /// Policy under which every sample is the identity.
    pub fn disabled(crop_pad_size: u32) -> Self {
        Self {
            p_affine: 0.0,
            do_flip: false,
            max_lighting: 0.0,
            cutout_p: 0.0,
            ..Self::new(crop_pad_size)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
            }
        };
        prob("p_affine", self.p_affine)?;
        prob("cutout_p", self.cutout_p)?;
        if !(self.max_rotate >= 0.0 && self.max_rotate.is_finite()) {
            return Err(Error::Config(format!("max_rotate must be >= 0, got {}", self.max_rotate)));
        }
        if !(self.max_zoom >= 1.0 && self.max_zoom.is_finite()) {
            return Err(Error::Config(format!("max_zoom must be >= 1, got {}", self.max_zoom)));
        }
        if !(0.0..1.0).contains(&self.max_lighting) {
            return Err(Error::Config(format!("max_lighting must lie in [0, 1), got {}", self.max_lighting)));
        }
        if !(self.max_shear >= 0.0 && self.max_shear.is_finite()) {
            return Err(Error::Config(format!("max_shear must be >= 0, got {}", self.max_shear)));
        }
        if self.crop_pad_size == 0 {
            return Err(Error::Config("crop_pad_size must be positive".into()));
        }
        if self.cutout_holes.0 > self.cutout_holes.1 || self.cutout_length.0 > self.cutout_length.1 || self.cutout_length.0 == 0 {
            return Err(Error::Config("cutout ranges must be ordered and lengths positive".into()));
        }
        Ok(())
    }
}

/// Axis-aligned rectangle in output pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutoutRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

/// One concrete draw from an [`AugmentationPolicy`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSample {
    pub apply_affine: bool,
    /// Degrees, counter-clockwise as displayed.
    pub angle: f64,
    /// Content shift as a fraction of the input width / height.
    pub dx: f64,
    pub dy: f64,
    pub zoom: f64,
    pub shear: f64,
    pub flip_h: bool,
    pub flip_v: bool,
    /// Brightness change in `[-max_lighting, max_lighting]`.
    pub lighting: f64,
    /// Contrast change in `[-max_lighting, max_lighting]`.
    pub contrast: f64,
    pub cutout: Vec<CutoutRect>,
    pub output_size: u32,
}

impl TransformSample {
    pub fn identity(output_size: u32) -> Self {
        Self {
            apply_affine: false,
            angle: 0.0,
            dx: 0.0,
            dy: 0.0,
            zoom: 1.0,
            shear: 0.0,
            flip_h: false,
            flip_v: false,
            lighting: 0.0,
            contrast: 0.0,
            cutout: Vec::new(),
            output_size,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.output_size)
    }
}

/// Draw a transform for `item_key` under run seed `seed`.
///
/// The stream comes from [`crate::rng::keyed_rng`], so the result depends
/// only on `(policy, seed, item_key)`. Translation is bounded by the margin
/// the zoom creates, `(1 - 1/zoom) / 2`, so zoomed content never leaves
/// the frame through translation alone.
pub fn sample_transform(policy: &AugmentationPolicy, seed: u64, item_key: &str) -> TransformSample {
    let mut rng = keyed_rng(seed, item_key);
    let mut t = TransformSample::identity(policy.crop_pad_size);

    if bernoulli(&mut rng, policy.p_affine) {
        t.apply_affine = true;
        t.angle = uniform(&mut rng, -policy.max_rotate, policy.max_rotate);
        t.zoom = uniform(&mut rng, 1.0, policy.max_zoom);
        let margin = (1.0 - 1.0 / t.zoom) / 2.0;
        t.dx = uniform(&mut rng, -margin, margin);
        t.dy = uniform(&mut rng, -margin, margin);
        if policy.max_shear > 0.0 {
            t.shear = uniform(&mut rng, -policy.max_shear, policy.max_shear);
        }
    }
    if policy.do_flip {
        t.flip_h = bernoulli(&mut rng, 0.5);
        if policy.flip_vert {
            t.flip_v = bernoulli(&mut rng, 0.5);
        }
    }
    if policy.max_lighting > 0.0 {
        t.lighting = uniform(&mut rng, -policy.max_lighting, policy.max_lighting);
        t.contrast = uniform(&mut rng, -policy.max_lighting, policy.max_lighting);
    }
    if bernoulli(&mut rng, policy.cutout_p) {
        let size = policy.crop_pad_size;
        let holes = int_inclusive(&mut rng, policy.cutout_holes.0, policy.cutout_holes.1);
        for _ in 0..holes {
            let w = int_inclusive(&mut rng, policy.cutout_length.0, policy.cutout_length.1).min(size);
            let h = int_inclusive(&mut rng, policy.cutout_length.0, policy.cutout_length.1).min(size);
            let x = int_inclusive(&mut rng, 0, size - w);
            let y = int_inclusive(&mut rng, 0, size - h);
            t.cutout.push(CutoutRect { x, y, w, h });
        }
    }
    t
}
