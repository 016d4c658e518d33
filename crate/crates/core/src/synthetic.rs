//! Deterministic synthetic dermoscopy-like fixtures.
//!
//! Each image is a skin-toned field with one elliptical lesion whose colour
//! is a jittered class prototype, surrounded by a near-black frame of random
//! width on each side. The colour jitter is wide enough that neighbouring
//! prototypes overlap, so a colour-distance classifier is imperfect.

use std::fs;
use std::path::Path;

use crate::datamodel::{write_ground_truth, Category, GroundTruthSet, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::preprocess::ContentBox;
use crate::rng::{int_inclusive, keyed_rng, uniform};
use crate::tensor::ImageTensor;

/// Mean lesion colour per category.
pub const PROTOTYPES: [[u8; 3]; NUM_CLASSES] = [
    [70, 45, 40],    // MEL
    [150, 100, 70],  // NV
    [200, 120, 130], // BCC
    [190, 150, 110], // AK
    [130, 110, 60],  // BKL
    [160, 80, 60],   // DF
    [170, 40, 70],   // VASC
    [220, 170, 160], // SCC
    [90, 130, 150],  // UNK
];

pub const WIDTH: u32 = 96;
pub const HEIGHT: u32 = 72;
pub const MAX_BORDER: u32 = 12;
const JITTER: f64 = 45.0;

/// Image id of the `index`-th synthetic image.
pub fn image_id(index: usize) -> String {
    format!("SYN_{index:04}")
}

/// Category of the `index`-th synthetic image.
pub fn label_of(index: usize) -> Category {
    Category::ALL[index % NUM_CLASSES]
}

/// Render image `index` and return it with its true content box.
pub fn synthetic_image(seed: u64, index: usize) -> (ImageTensor, ContentBox) {
    let mut rng = keyed_rng(seed, &format!("synthetic/{index}"));
    let proto = PROTOTYPES[label_of(index).index()];
    let mut border = || int_inclusive(&mut rng, 0, MAX_BORDER);
    let (left, top, right, bottom) = (border(), border(), border(), border());
    let content = ContentBox {
        left,
        top,
        right: WIDTH - right,
        bottom: HEIGHT - bottom,
    };
    let lesion: [f64; 3] = std::array::from_fn(|k| (proto[k] as f64 + uniform(&mut rng, -JITTER, JITTER)).clamp(0.0, 255.0));
    let skin = [
        uniform(&mut rng, 215.0, 235.0),
        uniform(&mut rng, 170.0, 190.0),
        uniform(&mut rng, 150.0, 170.0),
    ];
    let frame = int_inclusive(&mut rng, 0, 8) as u8;
    let cx = (content.left + content.right) as f64 / 2.0 + uniform(&mut rng, -4.0, 4.0);
    let cy = (content.top + content.bottom) as f64 / 2.0 + uniform(&mut rng, -4.0, 4.0);
    let rx = content.width() as f64 * uniform(&mut rng, 0.28, 0.38);
    let ry = content.height() as f64 * uniform(&mut rng, 0.28, 0.38);

    let img = ImageTensor::from_fn(WIDTH, HEIGHT, |x, y| {
        if x < content.left || x >= content.right || y < content.top || y >= content.bottom {
            return [frame; 3];
        }
        let (u, v) = ((x as f64 + 0.5 - cx) / rx, (y as f64 + 0.5 - cy) / ry);
        let c = if u * u + v * v <= 1.0 { lesion } else { skin };
        c.map(|s| s.round() as u8)
    });
    (img, content)
}

/// Write `per_class * 9` PNGs to `dir/images` and their one-hot labels to
/// `dir/truth.csv`.
pub fn write_dataset(dir: &Path, seed: u64, per_class: usize) -> Result<GroundTruthSet> {
    let images = dir.join("images");
    fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;
    let n = per_class * NUM_CLASSES;
    let mut ids = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (img, _) = synthetic_image(seed, i);
        let id = image_id(i);
        img.save_png(images.join(format!("{id}.png")))?;
        ids.push(id);
        labels.push(label_of(i));
    }
    let truth = GroundTruthSet::new(ids, labels)?;
    write_ground_truth(&truth, dir.join("truth.csv"))?;
    Ok(truth)
}

/// Mean colour of the central region covering `fraction` of each side.
pub fn central_mean(img: &ImageTensor, fraction: f64) -> [f64; 3] {
    let w = ((img.width() as f64 * fraction).round() as u32).clamp(1, img.width());
    let h = ((img.height() as f64 * fraction).round() as u32).clamp(1, img.height());
    let (x0, y0) = ((img.width() - w) / 2, (img.height() - h) / 2);
    let mut sum = [0.0; 3];
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            let p = img.pixel(x, y);
            for k in 0..3 {
                sum[k] += p[k] as f64;
            }
        }
    }
    sum.map(|s| s / (w as f64 * h as f64))
}

/// Negative squared distance to each prototype, scaled by `1 / temperature`.
pub fn prototype_logits(color: [f64; 3], temperature: f64) -> [f64; NUM_CLASSES] {
    std::array::from_fn(|c| {
        let d2: f64 = (0..3).map(|k| (color[k] - PROTOTYPES[c][k] as f64).powi(2)).sum();
        -d2 / temperature
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{detect_content_box, DEFAULT_MIN_KEEP, DEFAULT_THRESHOLD};

    #[test]
    fn deterministic_and_seed_dependent() {
        assert_eq!(synthetic_image(1, 5), synthetic_image(1, 5));
        assert_ne!(synthetic_image(1, 5).0, synthetic_image(2, 5).0);
    }

    #[test]
    fn borders_are_detected() {
        for i in 0..90 {
            let (img, content) = synthetic_image(42, i);
            assert_eq!(detect_content_box(&img, DEFAULT_THRESHOLD, DEFAULT_MIN_KEEP), content, "image {i}");
        }
    }

    #[test]
    fn labels_cycle() {
        assert_eq!(label_of(0), Category::Mel);
        assert_eq!(label_of(10), Category::Nv);
        assert_eq!(image_id(7), "SYN_0007");
    }

    #[test]
    fn nearest_prototype_is_usually_right() {
        let correct = (0..90)
            .filter(|&i| {
                let (img, content) = synthetic_image(42, i);
                let inner = img.crop(content.left, content.top, content.width(), content.height()).unwrap();
                let logits = prototype_logits(central_mean(&inner, 0.3), 1.0);
                let best = (0..NUM_CLASSES).max_by(|&a, &b| logits[a].total_cmp(&logits[b])).unwrap();
                best == label_of(i).index()
            })
            .count();
        assert!(correct > 45 && correct < 90, "{correct}");
    }

    #[test]
    fn dataset_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let truth = write_dataset(dir.path(), 3, 2).unwrap();
        assert_eq!(truth.len(), 18);
        assert!(dir.path().join("images/SYN_0017.png").exists());
        let back = crate::datamodel::parse_ground_truth(dir.path().join("truth.csv")).unwrap();
        assert_eq!(back, truth);
    }
}
