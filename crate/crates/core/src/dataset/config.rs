use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degrade::{DegradationKind, DegradationSpec, Level};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptStyle {
    /// The canonical single or two-modality template.
    #[default]
    Canonical,
    /// A per-record seeded pick from the whole template bank.
    Varied,
}

/// Synthesis settings, read from TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    /// Directory holding `ir/` and `vi/`.
    pub input: PathBuf,
    pub output: PathBuf,
    #[serde(default)]
    pub global_seed: u64,
    #[serde(default = "all_kinds")]
    pub kinds: Vec<DegradationKind>,
    #[serde(default = "anchor_levels")]
    pub levels: Vec<Level>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Emit one record per (pair, kind, level).
    #[serde(default = "yes")]
    pub singles: bool,
    /// Explicit two-kind combinations, each applied at every level.
    #[serde(default)]
    pub composites: Vec<[DegradationKind; 2]>,
    #[serde(default)]
    pub prompt_style: PromptStyle,
}

fn all_kinds() -> Vec<DegradationKind> {
    DegradationKind::ALL.to_vec()
}

fn anchor_levels() -> Vec<Level> {
    [1, 4, 7, 10].map(|l| Level::new(l).expect("anchor levels are valid")).to_vec()
}

fn default_test_fraction() -> f64 {
    0.1
}

fn yes() -> bool {
    true
}

impl SynthConfig {
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            output: output.into(),
            global_seed: 0,
            kinds: all_kinds(),
            levels: anchor_levels(),
            test_fraction: default_test_fraction(),
            singles: true,
            composites: Vec::new(),
            prompt_style: PromptStyle::default(),
        }
    }

    /// Parses by extension (`.toml`, otherwise JSON). Relative paths resolve against the
    /// config file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
            Self::from_toml(&text)?
        } else {
            Self::from_json(&text)?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.input, &mut cfg.output] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.test_fraction) {
            return Err(Error::Config(format!("test_fraction {} outside [0, 1]", self.test_fraction)));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("levels must be nonempty".into()));
        }
        if self.singles && self.kinds.is_empty() {
            return Err(Error::Config("kinds must be nonempty".into()));
        }
        if !self.singles && self.composites.is_empty() {
            return Err(Error::Config("nothing to synthesize: singles disabled and no composites".into()));
        }
        for (what, n) in [("kinds", dedup_len(&self.kinds)), ("levels", dedup_len(&self.levels))] {
            if n != if what == "kinds" { self.kinds.len() } else { self.levels.len() } {
                return Err(Error::Config(format!("duplicate entries in {what}")));
            }
        }
        for [a, b] in &self.composites {
            // Same-family operators on one modality cannot be composed.
            let level = self.levels[0];
            let specs = [DegradationSpec::new(*a, level, 0), DegradationSpec::new(*b, level, 0)];
            crate::degrade::check_composable(&specs)
                .map_err(|e| Error::Config(format!("composite [{a}, {b}]: {e}")))?;
        }
        Ok(())
    }

    /// Records per valid pair.
    pub fn records_per_pair(&self) -> usize {
        let singles = if self.singles { self.kinds.len() } else { 0 };
        (singles + self.composites.len()) * self.levels.len()
    }
}

fn dedup_len<T: Ord + Clone>(v: &[T]) -> usize {
    let mut s = v.to_vec();
    s.sort();
    s.dedup();
    s.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults() {
        let cfg = SynthConfig::from_toml("input = \"in\"\noutput = \"out\"\n").unwrap();
        assert_eq!(cfg.kinds.len(), 12);
        assert_eq!(cfg.levels.iter().map(|l| l.get()).collect::<Vec<_>>(), [1, 4, 7, 10]);
        assert_eq!(cfg.test_fraction, 0.1);
        assert_eq!(cfg.records_per_pair(), 48);
    }

    #[test]
    fn json_with_composites() {
        let cfg = SynthConfig::from_json(
            r#"{"input":"a","output":"b","global_seed":7,"kinds":["rain"],"levels":[2,5],
               "composites":[["rain_haze","stripe_noise"],["low_light","blur"]],"prompt_style":"varied"}"#,
        )
        .unwrap();
        assert_eq!(cfg.records_per_pair(), 6);
        assert_eq!(cfg.prompt_style, PromptStyle::Varied);
    }

    #[test]
    fn unknown_kind_is_named() {
        let err = SynthConfig::from_toml("input = \"a\"\noutput = \"b\"\nkinds = [\"snow\"]\n").unwrap_err();
        assert!(err.to_string().contains("snow"), "{err}");
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SynthConfig::from_toml("input = \"a\"\noutput = \"b\"\nlevels = [11]\n").is_err());
        assert!(SynthConfig::from_toml("input = \"a\"\noutput = \"b\"\ntest_fraction = 1.5\n").is_err());
        assert!(SynthConfig::from_toml("input = \"a\"\noutput = \"b\"\nlevels = [1, 1]\n").is_err());
        assert!(SynthConfig::from_toml("input = \"a\"\noutput = \"b\"\nextra = 1\n").is_err());
        // Two sensor-family operators on the visible image.
        assert!(SynthConfig::from_toml("input = \"a\"\noutput = \"b\"\ncomposites = [[\"blur\", \"gauss_noise\"]]\n").is_err());
    }
}
