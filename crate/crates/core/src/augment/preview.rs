use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

const GAP: u32 = 4;

/// Tile images of equal size into a grid with `columns` columns separated
/// by white gaps.
pub fn contact_sheet(images: &[ImageTensor], columns: u32) -> Result<ImageTensor> {
    let first = images.first().ok_or(Error::Empty("contact sheet images"))?;
    let (w, h) = (first.width(), first.height());
    if images.iter().any(|i| i.width() != w || i.height() != h) {
        return Err(Error::InvalidArgument("contact sheet images must share dimensions".into()));
    }
    let columns = columns.clamp(1, images.len() as u32);
    let rows = (images.len() as u32).div_ceil(columns);
    let sheet_w = columns * w + (columns + 1) * GAP;
    let sheet_h = rows * h + (rows + 1) * GAP;
    Ok(ImageTensor::from_fn(sheet_w, sheet_h, |x, y| {
        let (cx, cy) = (x.saturating_sub(GAP) / (w + GAP), y.saturating_sub(GAP) / (h + GAP));
        let (ix, iy) = (x.wrapping_sub(GAP + cx * (w + GAP)), y.wrapping_sub(GAP + cy * (h + GAP)));
        let index = (cy * columns + cx) as usize;
        if x < GAP || y < GAP || ix >= w || iy >= h || index >= images.len() {
            [255, 255, 255]
        } else {
            images[index].pixel(ix, iy)
        }
    }))
}
