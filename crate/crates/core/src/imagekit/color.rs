//! BT.601 full-range colour conversion.

use super::Image;
use crate::Result;

const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;
const CB_SCALE: f64 = 0.564;
const CR_SCALE: f64 = 0.713;

#[inline]
fn luma(r: f64, g: f64, b: f64) -> f64 {
    KR * r + KG * g + KB * b
}

/// RGB → YCbCr with chroma centred on 0.5.
pub fn rgb_to_ycbcr(img: &Image) -> Result<Image> {
    img.ensure_rgb("rgb_to_ycbcr")?;
    let mut data = Vec::with_capacity(img.data().len());
    for px in img.data().chunks_exact(3) {
        let (r, g, b) = (px[0], px[1], px[2]);
        let y = luma(r, g, b);
        data.push(y);
        data.push(0.5 + (b - y) * CB_SCALE);
        data.push(0.5 + (r - y) * CR_SCALE);
    }
    Image::new(img.height(), img.width(), 3, data)
}

/// Exact algebraic inverse of [`rgb_to_ycbcr`].
pub fn ycbcr_to_rgb(img: &Image) -> Result<Image> {
    img.ensure_rgb("ycbcr_to_rgb")?;
    let mut data = Vec::with_capacity(img.data().len());
    for px in img.data().chunks_exact(3) {
        let (y, cb, cr) = (px[0], px[1], px[2]);
        let r = y + (cr - 0.5) / CR_SCALE;
        let b = y + (cb - 0.5) / CB_SCALE;
        let g = (y - KR * r - KB * b) / KG;
        data.extend_from_slice(&[r, g, b]);
    }
    Image::new(img.height(), img.width(), 3, data)
}

/// BT.601 luma of an RGB image as a gray image. Gray input is returned unchanged.
pub fn luminance(img: &Image) -> Image {
    if img.is_gray() {
        return img.clone();
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|px| luma(px[0], px[1], px[2]))
        .collect();
    Image::new(img.height(), img.width(), 1, data).expect("luma plane has valid shape")
}
