use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::Image;
use crate::Result;

/// Unnormalised forward 2-D DFT of a gray image. DC sits at `(0, 0)`; row index is the
/// vertical frequency `v`, column index the horizontal frequency `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    height: usize,
    width: usize,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    #[inline]
    pub fn get(&self, v: usize, u: usize) -> Complex64 {
        self.coefficients[v * self.width + u]
    }

    pub fn dc(&self) -> Complex64 {
        self.coefficients[0]
    }

    /// `Σ |X|²`; equals `H·W·Σ x²` for the source image.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Signed-frequency magnitude of bin `(v, u)` in cycles per pixel, in `[0, √2/2]`.
    pub fn normalized_radius(&self, v: usize, u: usize) -> f64 {
        let fv = v.min(self.height - v) as f64 / self.height as f64;
        let fu = u.min(self.width - u) as f64 / self.width as f64;
        (fv * fv + fu * fu).sqrt()
    }

    /// `log(1 + |X|)` per bin, uncentred.
    pub fn log_magnitude(&self) -> Image {
        let data = self.coefficients.iter().map(|c| c.norm().ln_1p()).collect();
        Image::new(self.height, self.width, 1, data).expect("spectrum has valid shape")
    }

    /// Log-magnitude with DC moved to the centre (`fftshift`) and rescaled by its maximum into
    /// `[0, 1]`, ready for display.
    pub fn centered_log_magnitude(&self) -> Image {
        let (h, w) = (self.height, self.width);
        let raw = self.log_magnitude();
        let max = raw.max_value();
        let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
        Image::from_fn_gray(h, w, |y, x| {
            let sy = (y + h - h / 2) % h;
            let sx = (x + w - w / 2) % w;
            raw.get(sy, sx, 0) * scale
        })
        .expect("spectrum has valid shape")
    }

    /// Inverse DFT (with the `1/(H·W)` factor), real part.
    pub fn inverse(&self) -> Image {
        let mut buf = self.coefficients.clone();
        transform_2d(&mut buf, self.height, self.width, true);
        let norm = 1.0 / (self.height * self.width) as f64;
        let data = buf.iter().map(|c| c.re * norm).collect();
        Image::new(self.height, self.width, 1, data).expect("spectrum has valid shape")
    }
}

fn transform_2d(buf: &mut [Complex64], height: usize, width: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(width), planner.plan_fft_inverse(height))
    } else {
        (planner.plan_fft_forward(width), planner.plan_fft_forward(height))
    };
    for row in buf.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = buf[y * width + x];
        }
        col_fft.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            buf[y * width + x] = *c;
        }
    }
}

/// Forward 2-D DFT `X(v, u) = Σ_y Σ_x img(y, x) · e^{−j2π(ux/W + vy/H)}`.
pub fn dft2(img: &Image) -> Result<Spectrum> {
    img.ensure_gray("dft2")?;
    let (h, w) = (img.height(), img.width());
    let mut buf: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(&mut buf, h, w, false);
    Ok(Spectrum {
        height: h,
        width: w,
        coefficients: buf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_has_delta_spectrum() {
        let s = dft2(&Image::filled(4, 4, 1, 1.0).unwrap()).unwrap();
        assert!((s.dc().re - 16.0).abs() < 1e-12);
        for c in &s.coefficients()[1..] {
            assert!(c.norm() < 1e-12);
        }
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let img = Image::from_fn_gray(5, 3, |y, x| if y == 0 && x == 0 { 1.0 } else { 0.0 }).unwrap();
        let s = dft2(&img).unwrap();
        for c in s.coefficients() {
            assert!((c.re - 1.0).abs() < 1e-12 && c.im.abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let img = Image::from_fn_gray(6, 10, |y, x| ((y * 7 + x * 3) % 5) as f64 / 4.0).unwrap();
        let back = dft2(&img).unwrap().inverse();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn centred_view_puts_dc_in_middle() {
        let s = dft2(&Image::filled(6, 5, 1, 0.5).unwrap()).unwrap();
        let view = s.centered_log_magnitude();
        assert_eq!(view.get(3, 2, 0), 1.0);
        assert_eq!(view.data().iter().filter(|&&v| v > 1e-9).count(), 1);
    }
}
