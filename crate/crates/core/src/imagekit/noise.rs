use rand_distr::{Distribution, StandardNormal};

use super::Image;
use crate::seed::rng;
use crate::{Error, Result};

/// Scale on which noise standard deviations are quoted (8-bit intensity units).
pub const INTENSITY_SCALE: f64 = 255.0;

fn draw(n: usize, std: f64, seed: u64) -> Vec<f64> {
    if std == 0.0 {
        return vec![0.0; n];
    }
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * std
        })
        .collect()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("noise sigma must be >= 0, got {sigma}")))
    }
}

/// I.i.d. `N(0, (sigma/255)²)` field of shape `h × w`.
///
/// Samples come from a ChaCha8 stream seeded with `seed`, in row-major order, so the field is a
/// pure function of its arguments.
pub fn gaussian_field(h: usize, w: usize, sigma: f64, seed: u64) -> Result<Image> {
    gaussian_field_scaled(h, w, sigma, INTENSITY_SCALE, seed)
}

/// As [`gaussian_field`] with an explicit intensity scale (`1.0` means `sigma` is already on the
/// unit scale).
pub fn gaussian_field_scaled(h: usize, w: usize, sigma: f64, scale: f64, seed: u64) -> Result<Image> {
    check_sigma(sigma)?;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid(format!("intensity scale must be positive, got {scale}")));
    }
    Image::new(h, w, 1, draw(h * w, sigma / scale, seed))
}

/// Noise shaped like `like` (all channels), drawn in storage order. For a gray template this is
/// identical to [`gaussian_field`] with the same arguments.
pub fn gaussian_noise_like(like: &Image, sigma: f64, seed: u64) -> Result<Image> {
    check_sigma(sigma)?;
    let n = like.data().len();
    Image::new(
        like.height(),
        like.width(),
        like.channels(),
        draw(n, sigma / INTENSITY_SCALE, seed),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_zero_field() {
        let f = gaussian_field(8, 8, 0.0, 3).unwrap();
        assert!(f.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = gaussian_field(16, 16, 10.0, 42).unwrap();
        let b = gaussian_field(16, 16, 10.0, 42).unwrap();
        let c = gaussian_field(16, 16, 10.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn moments_within_clt_bounds() {
        let f = gaussian_field(256, 256, 20.0, 11).unwrap();
        let target = 20.0 / 255.0;
        let n = f.data().len() as f64;
        let mean = f.mean();
        let var = f.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() <= 3.0 * target / 256.0, "mean {mean}");
        assert!((var.sqrt() - target).abs() <= 0.05 * target);
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(gaussian_field(2, 2, -1.0, 0).is_err());
    }

    #[test]
    fn like_gray_matches_field() {
        let tmpl = Image::zeros(5, 7, 1).unwrap();
        assert_eq!(
            gaussian_noise_like(&tmpl, 12.0, 9).unwrap(),
            gaussian_field(5, 7, 12.0, 9).unwrap()
        );
    }
}
