use super::Image;
use crate::{Error, Result};

/// A dense 2-D filter kernel with odd dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    height: usize,
    width: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(height: usize, width: usize, weights: Vec<f64>) -> Result<Self> {
        if height % 2 == 0 || width % 2 == 0 {
            return Err(Error::invalid(format!(
                "kernel dimensions must be odd, got {height}x{width}"
            )));
        }
        if weights.len() != height * width {
            return Err(Error::invalid(format!(
                "kernel has {} weights for {height}x{width}",
                weights.len()
            )));
        }
        Ok(Self {
            height,
            width,
            weights,
        })
    }

    /// The 1×1 unit kernel.
    pub fn identity() -> Self {
        Self {
            height: 1,
            width: 1,
            weights: vec![1.0],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.width + col]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Same-size 2-D convolution with replicate-edge padding, applied per channel.
///
/// `out(y, x) = Σ k(i, j) · img(y − (i − cy), x − (j − cx))` with `(cy, cx)` the kernel centre.
pub fn convolve2d(img: &Image, kernel: &Kernel) -> Result<Image> {
    if kernel.height % 2 == 0 || kernel.width % 2 == 0 {
        return Err(Error::invalid("convolve2d: kernel dimensions must be odd"));
    }
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let cy = (kernel.height / 2) as isize;
    let cx = (kernel.width / 2) as isize;
    // Skip zero taps; motion kernels are mostly empty.
    let taps: Vec<(isize, isize, f64)> = (0..kernel.height)
        .flat_map(|i| (0..kernel.width).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let k = kernel.at(i, j);
            (k != 0.0).then_some((cy - i as isize, cx - j as isize, k))
        })
        .collect();

    let mut out = Image::zeros(h, w, c)?;
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for &(dy, dx, k) in &taps {
                    acc += k * img.get_clamped(y as isize + dy, x as isize + dx, ch);
                }
                out.set(y, x, ch, acc);
            }
        }
    }
    Ok(out)
}

/// Horizontal and vertical Sobel responses (correlation form, replicate boundary).
pub fn sobel_components(img: &Image) -> Result<(Image, Image)> {
    img.ensure_gray("sobel")?;
    let (h, w) = (img.height(), img.width());
    let mut gx = Vec::with_capacity(h * w);
    let mut gy = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let a = |dy: isize, dx: isize| img.get_clamped(y as isize + dy, x as isize + dx, 0);
            // Paired differences so flat regions give exactly zero.
            let sx = (a(-1, 1) - a(-1, -1)) + 2.0 * (a(0, 1) - a(0, -1)) + (a(1, 1) - a(1, -1));
            let sy = (a(1, -1) - a(-1, -1)) + 2.0 * (a(1, 0) - a(-1, 0)) + (a(1, 1) - a(-1, 1));
            gx.push(sx);
            gy.push(sy);
        }
    }
    Ok((Image::new(h, w, 1, gx)?, Image::new(h, w, 1, gy)?))
}

/// Sobel gradient magnitude `|Gx| + |Gy|`.
pub fn sobel(img: &Image) -> Result<Image> {
    let (gx, gy) = sobel_components(img)?;
    gx.zip_map(&gy, |a, b| a.abs() + b.abs())
}

fn box_pass(img: &Image, size: usize, horizontal: bool) -> Result<Image> {
    let r = (size / 2) as isize;
    let norm = 1.0 / size as f64;
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let mut out = Image::zeros(h, w, c)?;
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for d in -r..=r {
                    acc += if horizontal {
                        img.get_clamped(y as isize, x as isize + d, ch)
                    } else {
                        img.get_clamped(y as isize + d, x as isize, ch)
                    };
                }
                out.set(y, x, ch, acc * norm);
            }
        }
    }
    Ok(out)
}

/// Separable `size × size` mean filter with replicate boundary.
pub fn box_blur(img: &Image, size: usize) -> Result<Image> {
    if size % 2 == 0 {
        return Err(Error::invalid(format!("box size must be odd, got {size}")));
    }
    box_pass(&box_pass(img, size, true)?, size, false)
}

/// `1 × size` mean filter along rows.
pub(crate) fn box_blur_rows(img: &Image, size: usize) -> Result<Image> {
    if size % 2 == 0 {
        return Err(Error::invalid(format!("box size must be odd, got {size}")));
    }
    box_pass(img, size, true)
}
