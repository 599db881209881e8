use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kind::{DegradationKind, Modality};
use crate::imagekit::Image;
use crate::seed::rng;
use crate::{derive_seed, Error, Result};

/// Physical parameter ranges. Noise deviations are on the 8-bit scale.
pub mod ranges {
    /// Contrast factor; the level map is `α = 1 − 0.07·level`.
    pub const ALPHA_PER_LEVEL: f64 = 0.07;
    pub const EPSILON: (f64, f64) = (1.0, 15.0);
    pub const SIGMA: (f64, f64) = (5.0, 20.0);
    pub const KERNEL_LENGTH: (usize, usize) = (3, 12);
    pub const KERNEL_ANGLE: (f64, f64) = (10.0, 80.0);
    pub const GAMMA: (f64, f64) = (0.5, 3.0);
    /// Level 1 → first, level 10 → second.
    pub const LOW_LIGHT_GAMMA: (f64, f64) = (1.2, 3.0);
    pub const OVER_EXPOSURE_GAMMA: (f64, f64) = (0.83, 0.5);
    pub const BETA: (f64, f64) = (0.5, 2.0);
    pub const AIRLIGHT: (f64, f64) = (0.3, 0.9);
    pub const RAIN_INTENSITY: (f64, f64) = (0.15, 0.75);
}

/// Severity grade in `1..=10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Level(u8);

impl Level {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 10;

    pub fn new(level: i64) -> Result<Self> {
        if (Self::MIN as i64..=Self::MAX as i64).contains(&level) {
            Ok(Level(level as u8))
        } else {
            Err(Error::LevelOutOfRange(level))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Level> {
        (Self::MIN..=Self::MAX).map(Level)
    }
}

impl TryFrom<i64> for Level {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Level::new(value)
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.0
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Concrete physical parameters of one degradation instance. Only the fields used by the kind
/// are set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub airlight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rain_intensity: Option<f64>,
}

impl ResolvedParams {
    /// Fills every unset field from `defaults`.
    fn or(self, defaults: ResolvedParams) -> ResolvedParams {
        ResolvedParams {
            alpha: self.alpha.or(defaults.alpha),
            epsilon: self.epsilon.or(defaults.epsilon),
            sigma: self.sigma.or(defaults.sigma),
            kernel_length: self.kernel_length.or(defaults.kernel_length),
            kernel_angle: self.kernel_angle.or(defaults.kernel_angle),
            gamma: self.gamma.or(defaults.gamma),
            beta: self.beta.or(defaults.beta),
            airlight: self.airlight.or(defaults.airlight),
            rain_intensity: self.rain_intensity.or(defaults.rain_intensity),
        }
    }

    /// Checks every present field against its physical range.
    pub fn validate(&self) -> Result<()> {
        fn within(name: &str, v: Option<f64>, lo: f64, hi: f64) -> Result<()> {
            match v {
                Some(x) if !(x.is_finite() && x >= lo && x <= hi) => Err(Error::invalid(
                    format!("{name} = {x} outside [{lo}, {hi}]"),
                )),
                _ => Ok(()),
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::invalid(format!("alpha = {a} outside (0, 1)")));
            }
        }
        within("epsilon", self.epsilon, ranges::EPSILON.0, ranges::EPSILON.1)?;
        within("sigma", self.sigma, ranges::SIGMA.0, ranges::SIGMA.1)?;
        if let Some(n) = self.kernel_length {
            let (lo, hi) = ranges::KERNEL_LENGTH;
            if !(lo..=hi).contains(&n) {
                return Err(Error::invalid(format!("kernel_length = {n} outside [{lo}, {hi}]")));
            }
        }
        within("kernel_angle", self.kernel_angle, ranges::KERNEL_ANGLE.0, ranges::KERNEL_ANGLE.1)?;
        within("gamma", self.gamma, ranges::GAMMA.0, ranges::GAMMA.1)?;
        within("beta", self.beta, ranges::BETA.0, ranges::BETA.1)?;
        within("airlight", self.airlight, ranges::AIRLIGHT.0, ranges::AIRLIGHT.1)?;
        within("rain_intensity", self.rain_intensity, 0.0, 1.0)?;
        Ok(())
    }
}

fn lerp((lo, hi): (f64, f64), t: f64) -> f64 {
    (1.0 - t) * lo + t * hi
}

fn resolve(kind: DegradationKind, t: f64, seed: u64) -> ResolvedParams {
    use DegradationKind::*;
    let effective_level = 1.0 + 9.0 * t;
    let alpha = || Some(1.0 - ranges::ALPHA_PER_LEVEL * effective_level);
    let epsilon = || Some(lerp(ranges::EPSILON, t));
    let sigma = || Some(lerp(ranges::SIGMA, t));
    let beta = || Some(lerp(ranges::BETA, t));
    let airlight = || Some(lerp(ranges::AIRLIGHT, t));
    let rain = || Some(lerp(ranges::RAIN_INTENSITY, t));

    let mut p = ResolvedParams::default();
    match kind {
        Blur => {
            let (lo, hi) = ranges::KERNEL_LENGTH;
            p.kernel_length = Some((lo as f64 + (hi - lo) as f64 * t).round() as usize);
            // Motion direction is not a severity; draw it from the instance seed.
            let mut r = rng(derive_seed(seed, &["kernel-angle"]));
            p.kernel_angle = Some(r.random_range(ranges::KERNEL_ANGLE.0..=ranges::KERNEL_ANGLE.1));
        }
        GaussNoise | RandomNoise => p.sigma = sigma(),
        Rain => p.rain_intensity = rain(),
        Haze => {
            p.beta = beta();
            p.airlight = airlight();
        }
        RainHaze => {
            p.beta = beta();
            p.airlight = airlight();
            p.rain_intensity = rain();
        }
        LowLight => p.gamma = Some(lerp(ranges::LOW_LIGHT_GAMMA, t)),
        OverExposure => p.gamma = Some(lerp(ranges::OVER_EXPOSURE_GAMMA, t)),
        LowLightNoise => {
            p.gamma = Some(lerp(ranges::LOW_LIGHT_GAMMA, t));
            p.sigma = sigma();
        }
        LowContrast => p.alpha = alpha(),
        StripeNoise => p.epsilon = epsilon(),
        ContrastStripe => {
            p.alpha = alpha();
            p.epsilon = epsilon();
        }
    }
    p
}

/// Maps a severity level onto physical parameters by linear interpolation over each
/// parameter's range (level 1 → mildest end, level 10 → most severe end).
///
/// Severity-bearing parameters are monotone in level. The blur direction is drawn from `seed`.
pub fn severity_to_params(kind: DegradationKind, level: Level, seed: u64) -> ResolvedParams {
    let t = (level.get() - 1) as f64 / 9.0;
    resolve(kind, t, seed)
}

/// As [`severity_to_params`], with the effective level perturbed by a seeded offset in
/// `[−½, ½)` level steps (clamped to the `1..=10` span).
pub fn severity_to_params_jittered(kind: DegradationKind, level: Level, seed: u64) -> ResolvedParams {
    let mut r = rng(derive_seed(seed, &["level-jitter"]));
    let offset: f64 = r.random_range(-0.5..0.5);
    let t = ((level.get() as f64 - 1.0 + offset) / 9.0).clamp(0.0, 1.0);
    resolve(kind, t, seed)
}

/// One degradation instance: what, where, how strong, and the seed for its random draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationSpec {
    pub modality: Modality,
    pub kind: DegradationKind,
    pub level: Level,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ResolvedParams>,
}

impl DegradationSpec {
    /// A spec on the kind's own modality with parameters left to the severity map.
    pub fn new(kind: DegradationKind, level: Level, seed: u64) -> Self {
        Self {
            modality: kind.modality(),
            kind,
            level,
            seed,
            params: None,
        }
    }

    pub fn with_params(mut self, params: ResolvedParams) -> Self {
        self.params = Some(params);
        self
    }

    /// Explicit parameters merged over the severity map.
    pub fn resolved_params(&self) -> ResolvedParams {
        let defaults = severity_to_params(self.kind, self.level, self.seed);
        match &self.params {
            Some(p) => p.clone().or(defaults),
            None => defaults,
        }
    }

    /// Returns a copy whose `params` are fully populated.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        Ok(Self {
            params: Some(self.resolved_params()),
            ..self.clone()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.modality() != self.modality {
            return Err(Error::invalid(format!(
                "{} applies to the {} modality, not {}",
                self.kind,
                self.kind.modality(),
                self.modality
            )));
        }
        self.resolved_params().validate()
    }
}

/// Optional externally estimated maps for the visible image.
#[derive(Debug, Clone, Default)]
pub struct SideMaps {
    /// Illumination `L`, gray, strictly positive.
    pub illumination: Option<Image>,
    /// Scene depth `d(x)`, gray, non-negative, arbitrary units.
    pub depth: Option<Image>,
}

impl SideMaps {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate_for(&self, target: &Image) -> Result<()> {
        if let Some(l) = &self.illumination {
            l.ensure_gray("illumination map")?;
            l.ensure_same_size(target, "illumination map")?;
            if l.data().iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::invalid("illumination map must be strictly positive"));
            }
        }
        if let Some(d) = &self.depth {
            d.ensure_gray("depth map")?;
            d.ensure_same_size(target, "depth map")?;
            if d.data().iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::invalid("depth map must be non-negative"));
            }
        }
        Ok(())
    }
}
