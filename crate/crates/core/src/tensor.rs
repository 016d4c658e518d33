use std::path::Path;

use image::RgbImage;

use crate::error::{Error, Result};

/// 8-bit RGB image, row-major, three samples per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageTensor {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl ImageTensor {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!("image dimensions must be positive, got {width}x{height}")));
        }
        if data.len() != width as usize * height as usize * 3 {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height} RGB image needs {} samples, got {}",
                width as usize * height as usize * 3,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    /// Panics on zero dimensions.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        Self::from_fn(width, height, |_, _| rgb)
    }

    /// Panics on zero dimensions.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&rgb);
    }

    /// Rec. 601 luma `0.299 R + 0.587 G + 0.114 B`.
    pub fn luminance(&self, x: u32, y: u32) -> f64 {
        luminance(self.pixel(x, y))
    }

    pub fn crop(&self, left: u32, top: u32, width: u32, height: u32) -> Result<ImageTensor> {
        if width == 0 || height == 0 || left + width > self.width || top + height > self.height {
            return Err(Error::BoxOutOfRange {
                box_: (left, top, left + width, top + height),
                width: self.width,
                height: self.height,
            });
        }
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in top..top + height {
            let start = self.offset(left, y);
            data.extend_from_slice(&self.data[start..start + width as usize * 3]);
        }
        Ok(ImageTensor { width, height, data })
    }

    pub fn flip_horizontal(&self) -> ImageTensor {
        ImageTensor::from_fn(self.width, self.height, |x, y| self.pixel(self.width - 1 - x, y))
    }

    pub fn flip_vertical(&self) -> ImageTensor {
        ImageTensor::from_fn(self.width, self.height, |x, y| self.pixel(x, self.height - 1 - y))
    }

    pub fn to_rgb_image(&self) -> RgbImage {
        RgbImage::from_raw(self.width, self.height, self.data.clone()).expect("buffer size checked at construction")
    }

    pub fn from_rgb_image(img: RgbImage) -> Result<ImageTensor> {
        let (w, h) = img.dimensions();
        ImageTensor::new(w, h, img.into_raw())
    }

    /// Decode a PNG or JPEG file.
    pub fn load(path: impl AsRef<Path>) -> Result<ImageTensor> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|e| Error::image(path, e))?;
        ImageTensor::from_rgb_image(img.to_rgb8()).map_err(|e| Error::image(path, e))
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_rgb_image()
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::image(path, e))
    }

    /// Bilinear resize to exact dimensions.
    pub fn resized(&self, width: u32, height: u32) -> ImageTensor {
        if (width, height) == (self.width, self.height) {
            return self.clone();
        }
        let out = image::imageops::resize(&self.to_rgb_image(), width, height, image::imageops::FilterType::Triangle);
        ImageTensor::from_rgb_image(out).expect("resize keeps buffer consistent")
    }
}

pub fn luminance(rgb: [u8; 3]) -> f64 {
    0.299 * rgb[0] as f64 + 0.587 * rgb[1] as f64 + 0.114 * rgb[2] as f64
}
