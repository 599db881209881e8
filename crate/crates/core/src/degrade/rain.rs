use rand::Rng;

use super::kernel::line_kernel;
use crate::imagekit::{convolve2d, gaussian_field_scaled, Image};
use crate::seed::rng;
use crate::{derive_seed, Error, Result};

const DROP_QUANTILE: f64 = 0.98;
const STREAK_LENGTH: usize = 9;
const STREAK_ANGLE: (f64, f64) = (70.0, 110.0);

/// Additive rain-streak layer.
///
/// Standard normal noise is thresholded at its 98th percentile to seed drops, the drop mask is
/// smeared with a length-9 line kernel at a seeded near-vertical angle, and the streak map
/// (capped at 1) is scaled by `intensity`.
pub fn rain_layer(height: usize, width: usize, intensity: f64, seed: u64) -> Result<Image> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid(format!("rain intensity must be >= 0, got {intensity}")));
    }
    if intensity == 0.0 {
        return Image::zeros(height, width, 1);
    }
    let noise = gaussian_field_scaled(height, width, 1.0, 1.0, derive_seed(seed, &["rain-drops"]))?;
    let mut sorted = noise.data().to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((DROP_QUANTILE * sorted.len() as f64).ceil() as usize).saturating_sub(1);
    let threshold = sorted[idx.min(sorted.len() - 1)];
    let drops = noise.map(|v| if v > threshold { 1.0 } else { 0.0 });

    let mut angle_rng = rng(derive_seed(seed, &["rain-angle"]));
    let angle = angle_rng.random_range(STREAK_ANGLE.0..=STREAK_ANGLE.1);
    let streaks = convolve2d(&drops, &line_kernel(STREAK_LENGTH, angle))?;
    Ok(streaks.map(|v| (v * STREAK_LENGTH as f64).min(1.0) * intensity))
}
