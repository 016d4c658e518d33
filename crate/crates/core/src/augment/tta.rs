use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

pub const TTA_SCALE: f64 = 1.05;
pub const TTA_VARIANTS: usize = 8;

/// Top-left origins of the four corner crops, in the order top-left,
/// top-right, bottom-left, bottom-right.
pub fn corner_origins(width: u32, height: u32, crop: u32) -> [(u32, u32); 4] {
    let (r, b) = (width - crop, height - crop);
    [(0, 0), (r, 0), (0, b), (r, b)]
}

/// The eight test-time views of `img`: zoom by exactly `scale`, take the
/// four corner crops of side `crop_size`, and emit each corner unflipped
/// then horizontally flipped.
///
/// Order: TL, TL flipped, TR, TR flipped, BL, BL flipped, BR, BR flipped.
pub fn tta_variants(img: &ImageTensor, scale: f64, crop_size: u32) -> Result<Vec<ImageTensor>> {
    if !(scale > 0.0 && scale.is_finite()) || crop_size == 0 {
        return Err(Error::InvalidArgument("scale and crop size must be positive".into()));
    }
    let sw = ((img.width() as f64 * scale).round() as u32).max(1);
    let sh = ((img.height() as f64 * scale).round() as u32).max(1);
    if crop_size > sw || crop_size > sh {
        return Err(Error::InvalidArgument(format!(
            "crop {crop_size} larger than the {sw}x{sh} scaled image"
        )));
    }
    let scaled = img.resized(sw, sh);
    let mut out = Vec::with_capacity(TTA_VARIANTS);
    for (x, y) in corner_origins(sw, sh, crop_size) {
        let c = scaled.crop(x, y, crop_size, crop_size)?;
        let flipped = c.flip_horizontal();
        out.push(c);
        out.push(flipped);
    }
    Ok(out)
}
