//! Black-border removal and aspect-preserving rescaling.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::datamodel::{Manifest, ManifestRecord};
use crate::error::{Error, Result};
pub use crate::tensor::ImageTensor;

/// Retained region of an image; `right` and `bottom` are exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContentBox {
    pub left: u32,
    pub top: u32,
    pub right: u32,
    pub bottom: u32,
}

impl ContentBox {
    pub fn full(img: &ImageTensor) -> Self {
        Self {
            left: 0,
            top: 0,
            right: img.width(),
            bottom: img.height(),
        }
    }

    pub fn width(&self) -> u32 {
        self.right - self.left
    }

    pub fn height(&self) -> u32 {
        self.bottom - self.top
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }
}

pub const DEFAULT_THRESHOLD: f64 = 20.0;
pub const DEFAULT_MIN_KEEP: f64 = 0.25;

/// Luminance plane with helpers for line means over sub-ranges.
struct Luma {
    width: usize,
    values: Vec<f64>,
}

impl Luma {
    fn new(img: &ImageTensor) -> Self {
        let values = img
            .data()
            .chunks_exact(3)
            .map(|p| crate::tensor::luminance([p[0], p[1], p[2]]))
            .collect();
        Self {
            width: img.width() as usize,
            values,
        }
    }

    fn row_mean(&self, y: usize, cols: (usize, usize)) -> f64 {
        let row = &self.values[y * self.width..(y + 1) * self.width];
        row[cols.0..cols.1].iter().sum::<f64>() / (cols.1 - cols.0) as f64
    }

    fn col_mean(&self, x: usize, rows: (usize, usize)) -> f64 {
        (rows.0..rows.1).map(|y| self.values[y * self.width + x]).sum::<f64>() / (rows.1 - rows.0) as f64
    }
}

/// First and one-past-last index whose line mean reaches `threshold`.
fn bright_span(len: usize, threshold: f64, mean: impl Fn(usize) -> f64) -> Option<(usize, usize)> {
    let start = (0..len).find(|&i| mean(i) >= threshold)?;
    let end = (0..len).rev().find(|&i| mean(i) >= threshold)? + 1;
    Some((start, end))
}

fn brightest(len: usize, mean: impl Fn(usize) -> f64) -> (usize, usize) {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..len {
        let v = mean(i);
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    (best, best + 1)
}

/// Find the region left after stripping dark edge rows and columns.
///
/// A line is dark when its mean luminance over the current extent of the
/// other axis is below `threshold`. The first pass measures full lines; the
/// row and column extents are then re-measured against each other until
/// they stop changing, so a wide border on one axis does not dilute the
/// means on the other. If the kept area would fall below `min_keep` of the
/// image, the full box is returned.
pub fn detect_content_box(img: &ImageTensor, threshold: f64, min_keep: f64) -> ContentBox {
    let full = ContentBox::full(img);
    let (w, h) = (img.width() as usize, img.height() as usize);
    let luma = Luma::new(img);

    let full_rows = (0, h);
    let full_cols = (0, w);
    let first_rows = bright_span(h, threshold, |y| luma.row_mean(y, full_cols));
    let first_cols = bright_span(w, threshold, |x| luma.col_mean(x, full_rows));
    if first_rows.is_none() && first_cols.is_none() {
        return full;
    }
    let mut rows = first_rows.unwrap_or_else(|| brightest(h, |y| luma.row_mean(y, full_cols)));
    let mut cols = first_cols.unwrap_or_else(|| brightest(w, |x| luma.col_mean(x, full_rows)));

    for _ in 0..16 {
        let Some(new_rows) = bright_span(h, threshold, |y| luma.row_mean(y, cols)) else {
            return full;
        };
        let Some(new_cols) = bright_span(w, threshold, |x| luma.col_mean(x, new_rows)) else {
            return full;
        };
        let stable = new_rows == rows && new_cols == cols;
        rows = new_rows;
        cols = new_cols;
        if stable {
            break;
        }
    }

    let found = ContentBox {
        left: cols.0 as u32,
        top: rows.0 as u32,
        right: cols.1 as u32,
        bottom: rows.1 as u32,
    };
    if (found.area() as f64) < min_keep * full.area() as f64 {
        full
    } else {
        found
    }
}

pub fn trim_borders(img: &ImageTensor, b: ContentBox) -> Result<ImageTensor> {
    if b.left >= b.right || b.top >= b.bottom || b.right > img.width() || b.bottom > img.height() {
        return Err(Error::BoxOutOfRange {
            box_: (b.left, b.top, b.right, b.bottom),
            width: img.width(),
            height: img.height(),
        });
    }
    img.crop(b.left, b.top, b.width(), b.height())
}

/// Remove a fixed fraction of rows from the bottom (caption strips on
/// clinical photographs). At least one row is kept.
pub fn crop_bottom_fraction(img: &ImageTensor, fraction: f64) -> Result<ImageTensor> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("bottom crop fraction must lie in [0, 1), got {fraction}")));
    }
    let remove = (img.height() as f64 * fraction).round() as u32;
    let keep = (img.height() - remove).max(1);
    img.crop(0, 0, img.width(), keep)
}

/// Output dimensions with the shorter side equal to `target`.
pub fn aspect_dims(width: u32, height: u32, target: u32) -> (u32, u32) {
    let scale_long = |long: u32, short: u32| -> u32 {
        let num = long as u64 * target as u64 * 2 + short as u64;
        ((num / (2 * short as u64)) as u32).max(1)
    };
    if width <= height {
        (target, scale_long(height, width))
    } else {
        (scale_long(width, height), target)
    }
}

/// Bilinear rescale so the shorter side equals `target_short_side`.
pub fn resize_aspect(img: &ImageTensor, target_short_side: u32) -> Result<ImageTensor> {
    if target_short_side == 0 {
        return Err(Error::InvalidArgument("target short side must be at least 1".into()));
    }
    let (w, h) = aspect_dims(img.width(), img.height(), target_short_side);
    Ok(img.resized(w, h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub threshold: f64,
    pub min_keep: f64,
    pub target_short_side: u32,
    /// Fraction of rows cut from the bottom, per source dataset.
    pub bottom_crop: BTreeMap<String, f64>,
}

impl PreprocessConfig {
    pub fn new(target_short_side: u32) -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            min_keep: DEFAULT_MIN_KEEP,
            target_short_side,
            bottom_crop: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxRecord {
    pub path: String,
    pub content: ContentBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOutcome {
    /// Records that were processed, pointing at the written images.
    pub manifest: Manifest,
    pub boxes: Vec<BoxRecord>,
    pub failures: Vec<Failure>,
}

/// Bottom crop (if configured for the source), border removal and rescale
/// for one image.
pub fn preprocess_image(img: &ImageTensor, source: &str, config: &PreprocessConfig) -> Result<(ImageTensor, ContentBox)> {
    let img = match config.bottom_crop.get(source) {
        Some(&f) if f > 0.0 => crop_bottom_fraction(img, f)?,
        _ => img.clone(),
    };
    let content = detect_content_box(&img, config.threshold, config.min_keep);
    let trimmed = trim_borders(&img, content)?;
    Ok((resize_aspect(&trimmed, config.target_short_side)?, content))
}

/// Preprocess every image in `manifest`, writing PNGs named after the image
/// id into `out_dir`. Unreadable images are recorded as failures and left
/// out of the returned manifest; the rest are processed in parallel with
/// output order following the input.
pub fn preprocess_batch(manifest: &Manifest, out_dir: &Path, config: &PreprocessConfig) -> Result<PreprocessOutcome> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    // one job per distinct path; repeated (copied) records share the result
    let mut jobs: Vec<&ManifestRecord> = Vec::new();
    let mut job_of_path: HashMap<&str, usize> = HashMap::new();
    let mut owner_of_name: HashMap<String, &str> = HashMap::new();
    let mut collisions: HashMap<usize, String> = HashMap::new();
    for r in manifest.records() {
        if job_of_path.contains_key(r.path.as_str()) {
            continue;
        }
        let name = format!("{}.png", r.image_id());
        let idx = jobs.len();
        if let Some(other) = owner_of_name.insert(name.clone(), r.path.as_str()) {
            owner_of_name.insert(name.clone(), other);
            collisions.insert(idx, format!("output name {name} already used by {other}"));
        }
        job_of_path.insert(r.path.as_str(), idx);
        jobs.push(r);
    }

    let results: Vec<std::result::Result<(PathBuf, ContentBox), String>> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, r)| {
            if let Some(msg) = collisions.get(&idx) {
                return Err(msg.clone());
            }
            let img = ImageTensor::load(&r.path).map_err(|e| e.to_string())?;
            let (out, content) = preprocess_image(&img, &r.source, config).map_err(|e| e.to_string())?;
            let out_path = out_dir.join(format!("{}.png", r.image_id()));
            out.save_png(&out_path).map_err(|e| e.to_string())?;
            Ok((out_path, content))
        })
        .collect();

    let mut boxes = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in jobs.iter().zip(&results) {
        match res {
            Ok((_, content)) => boxes.push(BoxRecord {
                path: r.path.clone(),
                content: *content,
            }),
            Err(reason) => failures.push(Failure {
                path: r.path.clone(),
                reason: reason.clone(),
            }),
        }
    }
    let records = manifest
        .records()
        .iter()
        .filter_map(|r| match &results[job_of_path[r.path.as_str()]] {
            Ok((out_path, _)) => Some(ManifestRecord {
                path: out_path.to_string_lossy().into_owned(),
                ..r.clone()
            }),
            Err(_) => None,
        })
        .collect();
    Ok(PreprocessOutcome {
        manifest: Manifest::new(records)?,
        boxes,
        failures,
    })
}

/// CSV `path,left,top,right,bottom`.
pub fn write_box_log(boxes: &[BoxRecord], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(["path", "left", "top", "right", "bottom"])?;
    for b in boxes {
        let c = b.content;
        w.write_record([
            b.path.clone(),
            c.left.to_string(),
            c.top.to_string(),
            c.right.to_string(),
            c.bottom.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// CSV `path,reason`.
pub fn write_failure_log(failures: &[Failure], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(["path", "reason"])?;
    for f in failures {
        w.write_record([&f.path, &f.reason])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
