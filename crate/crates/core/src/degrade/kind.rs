use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Infrared,
    Visible,
}

impl Modality {
    pub const ALL: [Modality; 2] = [Modality::Infrared, Modality::Visible];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Infrared => "infrared",
            Modality::Visible => "visible",
        }
    }

    /// Short file-name tag.
    pub fn tag(self) -> &'static str {
        match self {
            Modality::Infrared => "ir",
            Modality::Visible => "vi",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "infrared" | "ir" => Ok(Modality::Infrared),
            "visible" | "vi" => Ok(Modality::Visible),
            other => Err(Error::invalid(format!("unknown modality `{other}`"))),
        }
    }
}

/// Operator family; at most one operator per family is applied to a modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Illumination,
    Weather,
    Sensor,
}

/// The twelve degradation kinds: eight for visible, four for infrared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradationKind {
    Blur,
    GaussNoise,
    Rain,
    Haze,
    RainHaze,
    LowLight,
    OverExposure,
    LowLightNoise,
    LowContrast,
    RandomNoise,
    StripeNoise,
    ContrastStripe,
}

impl DegradationKind {
    pub const ALL: [DegradationKind; 12] = [
        DegradationKind::Blur,
        DegradationKind::GaussNoise,
        DegradationKind::Rain,
        DegradationKind::Haze,
        DegradationKind::RainHaze,
        DegradationKind::LowLight,
        DegradationKind::OverExposure,
        DegradationKind::LowLightNoise,
        DegradationKind::LowContrast,
        DegradationKind::RandomNoise,
        DegradationKind::StripeNoise,
        DegradationKind::ContrastStripe,
    ];

    pub fn modality(self) -> Modality {
        use DegradationKind::*;
        match self {
            Blur | GaussNoise | Rain | Haze | RainHaze | LowLight | OverExposure
            | LowLightNoise => Modality::Visible,
            LowContrast | RandomNoise | StripeNoise | ContrastStripe => Modality::Infrared,
        }
    }

    pub fn families(self) -> &'static [Family] {
        use DegradationKind::*;
        match self {
            LowLight | OverExposure => &[Family::Illumination],
            Rain | Haze | RainHaze => &[Family::Weather],
            LowLightNoise => &[Family::Illumination, Family::Sensor],
            Blur | GaussNoise | LowContrast | RandomNoise | StripeNoise | ContrastStripe => {
                &[Family::Sensor]
            }
        }
    }

    /// Snake-case identifier used in JSON, configs and output paths.
    pub fn id(self) -> &'static str {
        use DegradationKind::*;
        match self {
            Blur => "blur",
            GaussNoise => "gauss_noise",
            Rain => "rain",
            Haze => "haze",
            RainHaze => "rain_haze",
            LowLight => "low_light",
            OverExposure => "over_exposure",
            LowLightNoise => "low_light_noise",
            LowContrast => "low_contrast",
            RandomNoise => "random_noise",
            StripeNoise => "stripe_noise",
            ContrastStripe => "contrast_stripe",
        }
    }
}

impl fmt::Display for DegradationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for DegradationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let needle = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        DegradationKind::ALL
            .into_iter()
            .find(|k| k.id() == needle)
            .ok_or_else(|| Error::UnknownKind(s.trim().to_string()))
    }
}
