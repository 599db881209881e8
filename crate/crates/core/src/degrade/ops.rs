use super::kernel::BlurKernel;
use super::params::{ranges, SideMaps};
use super::rain::rain_layer;
use crate::imagekit::{box_blur, convolve2d, gaussian_field, gaussian_noise_like, Image};
use crate::{Error, Result};

/// Lower bound applied to illumination maps before division.
pub const ILLUMINATION_FLOOR: f64 = 1e-3;

/// Side of the box filter used by the fallback illumination estimator.
const ILLUMINATION_WINDOW: usize = 15;

/// A single degradation operator. Implementations compute the raw physical model;
/// [`Degradation::apply`] adds the single clamp to `[0, 1]`.
pub trait Degradation {
    fn apply_unclamped(&self, img: &Image) -> Result<Image>;

    fn apply(&self, img: &Image) -> Result<Image> {
        Ok(self.apply_unclamped(img)?.clamped())
    }
}

/// Infrared contrast reduction with column stripe noise: `α·I + 1_H nᵀ`, `n ~ N(0, (ε/255)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastStripe {
    pub alpha: f64,
    /// Stripe standard deviation on the 8-bit scale.
    pub epsilon: f64,
    pub seed: u64,
}

impl Degradation for ContrastStripe {
    fn apply_unclamped(&self, img: &Image) -> Result<Image> {
        img.ensure_gray("contrast/stripe degradation")?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        let stripes = gaussian_field(1, img.width(), self.epsilon, self.seed)?;
        let n = stripes.data();
        let w = img.width();
        let data = img
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| self.alpha * v + n[i % w])
            .collect();
        Image::new(img.height(), w, 1, data)
    }
}

/// Motion blur followed by additive Gaussian noise: `I ∗ K + N(0, (σ/255)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBlur {
    pub kernel: BlurKernel,
    /// Noise standard deviation on the 8-bit scale.
    pub sigma: f64,
    pub seed: u64,
}

impl Degradation for NoiseBlur {
    fn apply_unclamped(&self, img: &Image) -> Result<Image> {
        let blurred = if self.kernel.size() == 1 && self.kernel.at(0, 0) == 1.0 {
            img.clone()
        } else {
            convolve2d(img, &self.kernel)?
        };
        if self.sigma == 0.0 {
            return Ok(blurred);
        }
        let noise = gaussian_noise_like(img, self.sigma, self.seed)?;
        blurred.zip_map(&noise, |a, b| a + b)
    }
}

/// Retinex illumination distortion `(I / L) · L^γ` with a shared gray illumination map.
#[derive(Debug, Clone)]
pub struct Illumination<'a> {
    pub gamma: f64,
    /// Explicit map; estimated from the image when absent.
    pub map: Option<&'a Image>,
}

impl Degradation for Illumination<'_> {
    fn apply_unclamped(&self, img: &Image) -> Result<Image> {
        let (lo, hi) = ranges::GAMMA;
        if !(self.gamma.is_finite() && (lo..=hi).contains(&self.gamma)) {
            return Err(Error::invalid(format!("gamma {} outside [{lo}, {hi}]", self.gamma)));
        }
        let estimated;
        let map = match self.map {
            Some(m) => {
                SideMaps {
                    illumination: Some(m.clone()),
                    depth: None,
                }
                .validate_for(img)?;
                m
            }
            None => {
                estimated = estimate_illumination(img)?;
                &estimated
            }
        };
        if self.gamma == 1.0 {
            return Ok(img.clone());
        }
        let c = img.channels();
        let l = map.data();
        let data = img
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let li = l[i / c].max(ILLUMINATION_FLOOR);
                (v / li) * li.powf(self.gamma)
            })
            .collect();
        Image::new(img.height(), img.width(), c, data)
    }
}

/// Atmospheric scattering with an additive rain layer: `I·t + A(1 − t) + R`.
#[derive(Debug, Clone)]
pub struct Weather<'a> {
    /// Haze density; 0 disables haze.
    pub beta: f64,
    pub airlight: f64,
    pub rain_intensity: f64,
    /// Scene depth; a vertical ramp is used when absent.
    pub depth: Option<&'a Image>,
    /// Seed for the rain layer.
    pub seed: u64,
}

impl Weather<'_> {
    fn validate(&self) -> Result<()> {
        let (blo, bhi) = ranges::BETA;
        if !(self.beta == 0.0 || (blo..=bhi).contains(&self.beta)) {
            return Err(Error::invalid(format!(
                "beta {} must be 0 or within [{blo}, {bhi}]",
                self.beta
            )));
        }
        let (alo, ahi) = ranges::AIRLIGHT;
        if !(alo..=ahi).contains(&self.airlight) {
            return Err(Error::invalid(format!(
                "airlight {} outside [{alo}, {ahi}]",
                self.airlight
            )));
        }
        if !(self.rain_intensity.is_finite() && self.rain_intensity >= 0.0) {
            return Err(Error::invalid(format!(
                "rain intensity must be >= 0, got {}",
                self.rain_intensity
            )));
        }
        Ok(())
    }
}

impl Degradation for Weather<'_> {
    fn apply_unclamped(&self, img: &Image) -> Result<Image> {
        self.validate()?;
        let fallback;
        let depth = match self.depth {
            Some(d) => {
                SideMaps {
                    illumination: None,
                    depth: Some(d.clone()),
                }
                .validate_for(img)?;
                d
            }
            None => {
                fallback = fallback_depth(img.height(), img.width());
                &fallback
            }
        };
        let t = transmission_map(depth, self.beta);
        let rain = if self.rain_intensity > 0.0 {
            Some(rain_layer(img.height(), img.width(), self.rain_intensity, self.seed)?)
        } else {
            None
        };
        atmospheric_scatter(img, &t, self.airlight, rain.as_ref())
    }
}

/// `t = exp(−β·d)` per pixel.
pub fn transmission_map(depth: &Image, beta: f64) -> Image {
    depth.map(|d| (-beta * d).exp())
}

/// Vertical ramp `d(y, x) = y / H` used when no depth map is supplied.
pub fn fallback_depth(height: usize, width: usize) -> Image {
    Image::from_fn_gray(height, width, |y, _| y as f64 / height as f64)
        .expect("positive dimensions")
}

/// `I·t + A(1 − t) + R` without clamping. `t` and `R` are gray and broadcast over channels.
pub fn atmospheric_scatter(
    img: &Image,
    transmission: &Image,
    airlight: f64,
    rain: Option<&Image>,
) -> Result<Image> {
    transmission.ensure_gray("transmission map")?;
    transmission.ensure_same_size(img, "transmission map")?;
    if let Some(r) = rain {
        r.ensure_gray("rain layer")?;
        r.ensure_same_size(img, "rain layer")?;
    }
    let c = img.channels();
    let t = transmission.data();
    let data = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = i / c;
            let ti = t[p];
            let scattered = v * ti + airlight * (1.0 - ti);
            match rain {
                Some(r) => scattered + r.data()[p],
                None => scattered,
            }
        })
        .collect();
    Image::new(img.height(), img.width(), c, data)
}

/// Fallback illumination estimate: per-pixel channel maximum, 15×15 box smoothing, floored at
/// [`ILLUMINATION_FLOOR`].
pub fn estimate_illumination(img: &Image) -> Result<Image> {
    let c = img.channels();
    let max_rgb = img
        .data()
        .chunks_exact(c)
        .map(|px| px.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let max_rgb = Image::new(img.height(), img.width(), 1, max_rgb)?;
    Ok(box_blur(&max_rgb, ILLUMINATION_WINDOW)?.map(|v| v.max(ILLUMINATION_FLOOR)))
}

pub fn apply_contrast_stripe(ir: &Image, alpha: f64, epsilon: f64, seed: u64) -> Result<Image> {
    ContrastStripe {
        alpha,
        epsilon,
        seed,
    }
    .apply(ir)
}

pub fn apply_noise_blur(img: &Image, kernel: &BlurKernel, sigma: f64, seed: u64) -> Result<Image> {
    NoiseBlur {
        kernel: kernel.clone(),
        sigma,
        seed,
    }
    .apply(img)
}

pub fn apply_illumination(img: &Image, gamma: f64, maps: &SideMaps) -> Result<Image> {
    Illumination {
        gamma,
        map: maps.illumination.as_ref(),
    }
    .apply(img)
}

pub fn apply_weather(
    img: &Image,
    beta: f64,
    airlight: f64,
    rain_intensity: f64,
    maps: &SideMaps,
    seed: u64,
) -> Result<Image> {
    Weather {
        beta,
        airlight,
        rain_intensity,
        depth: maps.depth.as_ref(),
        seed,
    }
    .apply(img)
}
