//! 8-bit PNG persistence. Values map `v ↦ v/255` on load and `round(v·255)` (clamped) on save.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageReader, RgbImage};

use super::Image;
use crate::{Error, Result};

fn codec_err(path: &Path, source: image::ImageError) -> Error {
    match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        other => Error::Codec {
            path: path.to_path_buf(),
            source: other,
        },
    }
}

/// Quantises a unit-scale value to a byte.
#[inline]
pub fn quantize(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// The bytes [`save_png`] would write as pixel data for `img`.
pub fn quantized_bytes(img: &Image) -> Vec<u8> {
    img.data().iter().map(|&v| quantize(v)).collect()
}

fn from_dynamic(dynamic: DynamicImage) -> Image {
    let gray_like = matches!(
        dynamic.color(),
        image::ColorType::L8 | image::ColorType::L16 | image::ColorType::La8 | image::ColorType::La16
    );
    if gray_like {
        let buf = dynamic.to_luma8();
        let (w, h) = buf.dimensions();
        let data = buf.into_raw().into_iter().map(|b| b as f64 / 255.0).collect();
        Image::new(h as usize, w as usize, 1, data).expect("decoded image has valid shape")
    } else {
        let buf = dynamic.to_rgb8();
        let (w, h) = buf.dimensions();
        let data = buf.into_raw().into_iter().map(|b| b as f64 / 255.0).collect();
        Image::new(h as usize, w as usize, 3, data).expect("decoded image has valid shape")
    }
}

/// Loads a PNG as gray (for luma sources) or RGB (everything else; alpha is dropped).
pub fn load_png(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let reader = ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    let reader = reader.with_guessed_format().map_err(|e| Error::io(path, e))?;
    let dynamic = reader.decode().map_err(|e| codec_err(path, e))?;
    Ok(from_dynamic(dynamic))
}

/// Loads and converts to a single luminance channel.
pub fn load_gray(path: impl AsRef<Path>) -> Result<Image> {
    Ok(load_png(path)?.to_gray())
}

/// Loads and replicates gray sources to three channels.
pub fn load_rgb(path: impl AsRef<Path>) -> Result<Image> {
    Ok(load_png(path)?.to_rgb())
}

pub fn save_png(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let bytes = quantized_bytes(img);
    let result = if img.is_gray() {
        GrayImage::from_raw(w, h, bytes)
            .expect("buffer length matches")
            .save_with_format(path, image::ImageFormat::Png)
    } else {
        RgbImage::from_raw(w, h, bytes)
            .expect("buffer length matches")
            .save_with_format(path, image::ImageFormat::Png)
    };
    result.map_err(|e| codec_err(path, e))
}
