use super::policy::{CutoutRect, TransformSample};
use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

/// Mirror an integer index into `0..n` without repeating the edge sample.
fn reflect(i: i64, n: i64) -> u32 {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - m }) as u32
}

fn sample_bilinear(img: &ImageTensor, x: f64, y: f64) -> [f64; 3] {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let x0 = x.floor();
    let y0 = y.floor();
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as i64, y0 as i64);
    let p = |xi: i64, yi: i64| img.pixel(reflect(xi, w), reflect(yi, h));
    let (a, b, c, d) = (p(x0, y0), p(x0 + 1, y0), p(x0, y0 + 1), p(x0 + 1, y0 + 1));
    std::array::from_fn(|k| {
        let top = a[k] as f64 * (1.0 - fx) + b[k] as f64 * fx;
        let bottom = c[k] as f64 * (1.0 - fx) + d[k] as f64 * fx;
        top * (1.0 - fy) + bottom * fy
    })
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Brightness shift and contrast scaling in logit space.
fn adjust_lighting(v: u8, brightness: f64, contrast: f64) -> u8 {
    let p = (v as f64 / 255.0).clamp(0.25 / 255.0, 254.75 / 255.0);
    let shift = ((0.5 + brightness / 2.0) / (0.5 - brightness / 2.0)).ln();
    let z = ((p / (1.0 - p)).ln() + shift) * (1.0 + contrast);
    to_u8(255.0 / (1.0 + (-z).exp()))
}

/// Render `t` on `img`: affine warp with bilinear sampling and reflection
/// padding, centre crop/pad to the square output, flips, lighting, cutout.
pub fn apply_transform(img: &ImageTensor, t: &TransformSample) -> Result<ImageTensor> {
    if img.width() < 2 || img.height() < 2 {
        return Err(Error::InvalidArgument("augmentation needs an image of at least 2x2".into()));
    }
    if t.output_size == 0 {
        return Err(Error::InvalidArgument("output size must be positive".into()));
    }
    let s = t.output_size;
    let (w, h) = (img.width() as f64, img.height() as f64);
    // integer crop/pad offset keeps the identity exact
    let off_x = (img.width() as i64 - s as i64).div_euclid(2) as f64;
    let off_y = (img.height() as i64 - s as i64).div_euclid(2) as f64;
    let c_out = (s as f64 - 1.0) / 2.0;
    let (cos, sin) = t.angle.to_radians().sin_cos();
    let (cos, sin) = (sin, cos);

    let mut out = ImageTensor::from_fn(s, s, |u, v| {
        let u = if t.flip_h { s - 1 - u } else { u } as f64;
        let v = if t.flip_v { s - 1 - v } else { v } as f64;
        let (ox, oy) = (u - c_out, v - c_out);
        let (sx, sy) = if t.apply_affine {
            // inverse of rotate(shear(zoom(p)))
            let rx = ox * cos - oy * sin;
            let ry = ox * sin + oy * cos;
            let shx = rx - t.shear * ry;
            (shx / t.zoom - t.dx * w, ry / t.zoom - t.dy * h)
        } else {
            (ox, oy)
        };
        let px = sample_bilinear(img, sx + c_out + off_x, sy + c_out + off_y);
        px.map(to_u8)
    });

    if t.lighting != 0.0 || t.contrast != 0.0 {
        let data: Vec<u8> = out.data().iter().map(|&v| adjust_lighting(v, t.lighting, t.contrast)).collect();
        out = ImageTensor::new(s, s, data)?;
    }
    for rect in &t.cutout {
        out = apply_cutout(&out, *rect, 0)?;
    }
    Ok(out)
}

/// Set every sample inside `rect` to `fill`.
pub fn apply_cutout(img: &ImageTensor, rect: CutoutRect, fill: u8) -> Result<ImageTensor> {
    if rect.w == 0 || rect.h == 0 || rect.x + rect.w > img.width() || rect.y + rect.h > img.height() {
        return Err(Error::BoxOutOfRange {
            box_: (rect.x, rect.y, rect.x + rect.w, rect.y + rect.h),
            width: img.width(),
            height: img.height(),
        });
    }
    let mut out = img.clone();
    for y in rect.y..rect.y + rect.h {
        for x in rect.x..rect.x + rect.w {
            out.set_pixel(x, y, [fill; 3]);
        }
    }
    Ok(out)
}
