use crate::degrade::DegradationKind;
use crate::{Error, Result};

const NUMBER_WORDS: [&str; 10] = ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];

/// Name used when rendering a kind into a prompt.
pub fn display_name(kind: DegradationKind) -> &'static str {
    use DegradationKind::*;
    match kind {
        Blur => "blur",
        GaussNoise => "gaussian noise",
        Rain => "rain",
        Haze => "haze",
        RainHaze => "rain-haze",
        LowLight => "low-light",
        OverExposure => "over-exposure",
        LowLightNoise => "low-light noise",
        LowContrast => "low-contrast",
        RandomNoise => "random noise",
        StripeNoise => "stripe noise",
        ContrastStripe => "low-contrast stripe noise",
    }
}

/// Extra spellings accepted when parsing, beyond the display name and the snake-case id.
const SYNONYMS: &[(&str, DegradationKind)] = &[
    ("motion blur", DegradationKind::Blur),
    ("blurring", DegradationKind::Blur),
    ("noise", DegradationKind::GaussNoise),
    ("gaussian", DegradationKind::GaussNoise),
    ("gauss noise", DegradationKind::GaussNoise),
    ("rain streaks", DegradationKind::Rain),
    ("fog", DegradationKind::Haze),
    ("rainy haze", DegradationKind::RainHaze),
    ("hazy rain", DegradationKind::RainHaze),
    ("dark", DegradationKind::LowLight),
    ("low illumination", DegradationKind::LowLight),
    ("overexposed", DegradationKind::OverExposure),
    ("noisy low-light", DegradationKind::LowLightNoise),
    ("low contrast", DegradationKind::LowContrast),
    ("stripe", DegradationKind::StripeNoise),
    ("stripes", DegradationKind::StripeNoise),
    ("contrast stripe", DegradationKind::ContrastStripe),
    ("low-contrast stripe", DegradationKind::ContrastStripe),
];

// Hyphens, underscores, spaces and case are not significant: "low-light", "low light",
// "Low_Light" and "lowlight" share a key.
fn key(name: &str) -> String {
    name.chars().filter(|c| c.is_ascii_alphanumeric()).map(|c| c.to_ascii_lowercase()).collect()
}

/// Resolves a kind name as it may appear in a prompt.
pub fn kind_from_name(name: &str) -> Result<DegradationKind> {
    let k = key(name);
    DegradationKind::ALL
        .iter()
        .find(|kind| key(display_name(**kind)) == k || key(kind.id()) == k)
        .copied()
        .or_else(|| SYNONYMS.iter().find(|(s, _)| key(s) == k).map(|(_, kind)| *kind))
        .ok_or_else(|| Error::UnknownKind(name.trim().to_string()))
}

/// Severity as digits or an English number word.
pub fn severity_value(text: &str) -> i64 {
    let t = text.trim().to_ascii_lowercase();
    if let Some(i) = NUMBER_WORDS.iter().position(|w| *w == t) {
        return i as i64 + 1;
    }
    t.parse::<i64>().unwrap_or(i64::MAX)
}

pub(crate) fn severity_pattern() -> String {
    format!(r"\d+|{}", NUMBER_WORDS.join("|"))
}

/// English word for a level in `1..=10`.
pub fn severity_word(level: u8) -> Option<&'static str> {
    NUMBER_WORDS.get(usize::from(level).checked_sub(1)?).copied()
}
