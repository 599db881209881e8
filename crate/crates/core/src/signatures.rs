//! Hand-crafted degradation signatures and the embedding alignment loss.
//!
//! A signature summarises where an image's spectral energy sits (radial profile and three bands),
//! a few spatial statistics, and a stripe indicator.

use serde::{Deserialize, Serialize};

use crate::imagekit::filter::box_blur_rows;
use crate::imagekit::{dft2, sobel_components};
use crate::{Error, Image, Result};

pub const DEFAULT_RADIAL_BINS: usize = 32;
/// Radius of the corner frequency `(1/2, 1/2)`, the largest normalised radius.
pub const MAX_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const LOW_BAND_EDGE: f64 = 1.0 / 6.0;
pub const MID_BAND_EDGE: f64 = 1.0 / 3.0;
const STRIPE_BLUR: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRatios {
    pub low: f64,
    pub mid: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialStats {
    pub mean: f64,
    pub variance: f64,
    /// Mean of `gx² + gy²` over Sobel responses.
    pub gradient_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureVector {
    /// `Σ|X|² / (H·W)` per radius bin.
    pub radial_profile: Vec<f64>,
    pub band_ratios: BandRatios,
    pub spatial_stats: SpatialStats,
    pub column_autocorr: f64,
}

impl SignatureVector {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV header for a signature with `bins` radial bins.
    pub fn csv_header(bins: usize) -> String {
        let mut cols: Vec<String> = (0..bins).map(|i| format!("radial_{i}")).collect();
        cols.extend(
            ["band_low", "band_mid", "band_high", "mean", "variance", "gradient_energy", "column_autocorr"]
                .map(String::from),
        );
        cols.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        let b = &self.band_ratios;
        let s = &self.spatial_stats;
        self.radial_profile
            .iter()
            .chain(&[b.low, b.mid, b.high, s.mean, s.variance, s.gradient_energy, self.column_autocorr])
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn signature(img: &Image) -> Result<SignatureVector> {
    signature_with_bins(img, DEFAULT_RADIAL_BINS)
}

pub fn signature_with_bins(img: &Image, bins: usize) -> Result<SignatureVector> {
    img.ensure_gray("signature")?;
    if bins == 0 {
        return Err(Error::invalid("radial bin count must be positive"));
    }
    let spectrum = dft2(img)?;
    let (h, w) = (img.height(), img.width());
    let norm = 1.0 / (h * w) as f64;
    let mut radial = vec![0.0; bins];
    let mut bands = [0.0; 3];
    for v in 0..h {
        for u in 0..w {
            let e = spectrum.get(v, u).norm_sqr() * norm;
            let r = spectrum.normalized_radius(v, u);
            let bin = ((r / MAX_RADIUS * bins as f64) as usize).min(bins - 1);
            radial[bin] += e;
            let band = if r < LOW_BAND_EDGE {
                0
            } else if r < MID_BAND_EDGE {
                1
            } else {
                2
            };
            bands[band] += e;
        }
    }
    let total: f64 = bands.iter().sum();
    let band_ratios = if total > 0.0 {
        BandRatios { low: bands[0] / total, mid: bands[1] / total, high: bands[2] / total }
    } else {
        BandRatios { low: 1.0, mid: 0.0, high: 0.0 }
    };

    let mean = img.mean();
    let variance = img.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() * norm;
    let (gx, gy) = sobel_components(img)?;
    let gradient_energy = gx.data().iter().zip(gy.data()).map(|(a, b)| a * a + b * b).sum::<f64>() * norm;

    Ok(SignatureVector {
        radial_profile: radial,
        band_ratios,
        spatial_stats: SpatialStats { mean, variance, gradient_energy },
        column_autocorr: column_autocorr(img)?,
    })
}

/// Stripe indicator: lag-1 correlation down each column of the high-pass residual
/// `img − rowblur(img)`, averaged over columns with nonzero residual.
///
/// Vertical stripes leave a residual that is constant down each column, which scores 1.
/// Independent noise scores near 0. The correlation is not mean-centred, since centring a
/// constant column would leave nothing to correlate.
pub fn column_autocorr(img: &Image) -> Result<f64> {
    img.ensure_gray("column_autocorr")?;
    let (h, w) = (img.height(), img.width());
    if h < 2 {
        return Ok(0.0);
    }
    let blurred = box_blur_rows(img, STRIPE_BLUR)?;
    let residual = img.zip_map(&blurred, |a, b| a - b)?;
    let (mut sum, mut count) = (0.0, 0usize);
    for x in 0..w {
        let (mut cross, mut head, mut tail) = (0.0, 0.0, 0.0);
        for y in 0..h - 1 {
            let a = residual.get(y, x, 0);
            let b = residual.get(y + 1, x, 0);
            cross += a * b;
            head += a * a;
            tail += b * b;
        }
        let denom = (head * tail).sqrt();
        if denom > 1e-24 {
            sum += cross / denom;
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// A fixed-length numeric embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Embedding {
    values: Vec<f64>,
}

pub const DEFAULT_EMBEDDING_DIM: usize = 512;

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("embedding must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("embedding values must be finite"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }
}

impl TryFrom<Vec<f64>> for Embedding {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Embedding> for Vec<f64> {
    fn from(e: Embedding) -> Self {
        e.values
    }
}

/// Default `(λ1, λ2)`: distance and cosine terms weighted 1:3.
pub const DEFAULT_ALIGNMENT_WEIGHTS: (f64, f64) = (1.0, 3.0);

/// `λ1·Σ(p_vis − p_text)² + λ2·(1 − cos(p_vis, p_text))`.
///
/// The distance term is a plain sum of squares, not a mean over dimensions.
pub fn alignment_loss(p_vis: &Embedding, p_text: &Embedding, lambda1: f64, lambda2: f64) -> Result<f64> {
    if p_vis.dim() != p_text.dim() {
        return Err(Error::invalid(format!("embedding dims differ: {} vs {}", p_vis.dim(), p_text.dim())));
    }
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) {
        return Err(Error::invalid("loss weights must be nonnegative"));
    }
    let (mut dist, mut dot, mut na, mut nb) = (0.0, 0.0, 0.0, 0.0);
    for (a, b) in p_vis.values().iter().zip(p_text.values()) {
        dist += (a - b) * (a - b);
        dot += a * b;
        na += a * a;
        nb += b * b;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedCosine);
    }
    let cos = (dot / (na * nb).sqrt()).clamp(-1.0, 1.0);
    Ok(lambda1 * dist + lambda2 * (1.0 - cos))
}
