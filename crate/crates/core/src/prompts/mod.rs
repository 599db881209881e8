//! Degradation prompts: the template bank, rendering specs to text and parsing text back.
//!
//! Each template is a sentence with slots. Single-degradation templates carry `{modality}`,
//! `{severity}` and `{kind}`. Two-modality composites carry the same slots suffixed `_a` and `_b`.
//! Same-modality composites share one `{modality}` and one `{severity}` between `{kind_a}` and
//! `{kind_b}`.
//!
//! Parsing is exact up to case, runs of whitespace and a trailing period. Anything else is rejected
//! with the nearest template as a hint.

mod names;

use std::sync::OnceLock;

use rand::Rng;
use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::degrade::{DegradationSpec, Level, Modality};
use crate::{Error, Result};

pub use names::{display_name, kind_from_name, severity_value, severity_word};

/// Meaning of the four training anchor levels.
pub const SEVERITY_ANCHORS: [(u8, &str); 4] = [
    (1, "barely perceptible degradation"),
    (4, "degradation begins to interfere with human scene understanding"),
    (7, "degradation severely hinders human perception of the scene"),
    (10, "most useful information is completely obscured"),
];

pub const CANONICAL_SINGLE: &str = "single-canonical";
pub const CANONICAL_COMPOSITE: &str = "composite-canonical";
pub const CANONICAL_SAME_MODALITY: &str = "same-modality-canonical";

const BANK_JSON: &str = include_str!("templates.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arity {
    Single,
    CompositeTwo,
    CompositeSameModality,
}

impl Arity {
    fn slots(self) -> &'static [&'static str] {
        match self {
            Arity::Single => &["modality", "severity", "kind"],
            Arity::CompositeTwo => &["modality_a", "severity_a", "kind_a", "modality_b", "severity_b", "kind_b"],
            Arity::CompositeSameModality => &["modality", "severity", "kind_a", "kind_b"],
        }
    }

    /// Whether this arity can express `specs` (count, and for same-modality a shared modality and level).
    pub fn accepts(self, specs: &[DegradationSpec]) -> bool {
        match (self, specs) {
            (Arity::Single, [_]) => true,
            (Arity::CompositeTwo, [_, _]) => true,
            (Arity::CompositeSameModality, [a, b]) => a.modality == b.modality && a.level == b.level,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub id: String,
    pub arity: Arity,
    pub pattern: String,
}

#[derive(Deserialize)]
struct BankFile {
    version: u32,
    templates: Vec<PromptTemplate>,
}

struct Compiled {
    template: PromptTemplate,
    regex: Regex,
}

struct Bank {
    version: u32,
    templates: Vec<PromptTemplate>,
    compiled: Vec<Compiled>,
}

fn bank() -> &'static Bank {
    static BANK: OnceLock<Bank> = OnceLock::new();
    BANK.get_or_init(|| {
        let file: BankFile = serde_json::from_str(BANK_JSON).expect("bundled template bank is valid JSON");
        let compiled = file
            .templates
            .iter()
            .map(|t| Compiled {
                template: t.clone(),
                regex: compile(t).unwrap_or_else(|e| panic!("bundled template {}: {e}", t.id)),
            })
            .collect();
        Bank { version: file.version, templates: file.templates, compiled }
    })
}

/// All shipped templates, in bank order.
pub fn template_bank() -> &'static [PromptTemplate] {
    &bank().templates
}

/// Version of the bundled template resource.
pub fn bank_version() -> u32 {
    bank().version
}

pub fn find_template(id: &str) -> Option<&'static PromptTemplate> {
    template_bank().iter().find(|t| t.id == id)
}

// Splits a pattern into literal text and slot names.
fn pieces(pattern: &str) -> Result<Vec<(bool, &str)>> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| Error::invalid(format!("unclosed slot in `{pattern}`")))?
            + open;
        if open > 0 {
            out.push((false, &rest[..open]));
        }
        out.push((true, &rest[open + 1..close]));
        rest = &rest[close + 1..];
    }
    if !rest.is_empty() {
        out.push((false, rest));
    }
    Ok(out)
}

fn compile(t: &PromptTemplate) -> Result<Regex> {
    let body = t.pattern.trim().trim_end_matches('.');
    let parts = pieces(body)?;
    let mut seen: Vec<&str> = parts.iter().filter(|(slot, _)| *slot).map(|(_, s)| *s).collect();
    seen.sort_unstable();
    let mut expected = t.arity.slots().to_vec();
    expected.sort_unstable();
    if seen != expected {
        return Err(Error::invalid(format!("template {} has slots {seen:?}, expected {expected:?}", t.id)));
    }
    let severity = names::severity_pattern();
    let mut re = String::from("(?i)^");
    for (is_slot, text) in parts {
        if is_slot {
            let class = match text.split('_').next().unwrap_or(text) {
                "modality" => "infrared|visible".to_string(),
                "severity" => severity.clone(),
                _ => "[a-z][a-z_ -]*?".to_string(),
            };
            re.push_str(&format!("(?P<{text}>{class})"));
        } else {
            let words: Vec<String> = normalize(text).split(' ').map(regex::escape).collect();
            let mut lit = words.join(" ");
            // Keep boundary spaces that the normalisation trimmed.
            if text.starts_with(char::is_whitespace) {
                lit.insert(0, ' ');
            }
            if text.ends_with(char::is_whitespace) && !lit.ends_with(' ') {
                lit.push(' ');
            }
            re.push_str(&lit);
        }
    }
    re.push_str(r"\.?$");
    Regex::new(&re).map_err(|e| Error::invalid(e.to_string()))
}

fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// How `render_prompt` picks its template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateChoice {
    /// The canonical template for the arity (two-modality form for two specs).
    Canonical,
    Id(String),
    /// Uniform pick among the templates that can express the specs.
    Seeded(u64),
}

fn check_arity(specs: &[DegradationSpec]) -> Result<()> {
    if specs.is_empty() || specs.len() > 2 {
        return Err(Error::UnsupportedArity(specs.len()));
    }
    for s in specs {
        if s.modality != s.kind.modality() {
            return Err(Error::invalid(format!("{} does not apply to the {} modality", s.kind, s.modality)));
        }
    }
    Ok(())
}

pub fn render_prompt(specs: &[DegradationSpec], choice: &TemplateChoice) -> Result<String> {
    check_arity(specs)?;
    let template = match choice {
        TemplateChoice::Canonical => {
            let id = if specs.len() == 1 { CANONICAL_SINGLE } else { CANONICAL_COMPOSITE };
            find_template(id).expect("canonical templates are bundled")
        }
        TemplateChoice::Id(id) => {
            find_template(id).ok_or_else(|| Error::invalid(format!("no template with id `{id}`")))?
        }
        TemplateChoice::Seeded(seed) => {
            let eligible: Vec<_> = template_bank().iter().filter(|t| t.arity.accepts(specs)).collect();
            let i = crate::seed::rng(*seed).random_range(0..eligible.len());
            eligible[i]
        }
    };
    render_with(template, specs)
}

pub fn render_with(template: &PromptTemplate, specs: &[DegradationSpec]) -> Result<String> {
    check_arity(specs)?;
    if !template.arity.accepts(specs) {
        return Err(Error::invalid(format!(
            "template {} ({:?}) cannot express {} degradation(s) as given",
            template.id,
            template.arity,
            specs.len()
        )));
    }
    let mut out = String::new();
    for (is_slot, text) in pieces(&template.pattern)? {
        if !is_slot {
            out.push_str(text);
            continue;
        }
        let (field, spec) = match text.rsplit_once('_') {
            Some((f, "a")) => (f, &specs[0]),
            Some((f, "b")) => (f, &specs[1]),
            // Unsuffixed slots are shared, so the first spec supplies them.
            _ => (text, &specs[0]),
        };
        match field {
            "modality" => out.push_str(spec.modality.as_str()),
            "severity" => out.push_str(&spec.level.get().to_string()),
            "kind" => out.push_str(display_name(spec.kind)),
            other => return Err(Error::invalid(format!("unknown slot `{other}`"))),
        }
    }
    Ok(out)
}

fn clause(caps: &Captures, modality: &str, severity: &str, kind: &str) -> Result<DegradationSpec> {
    let level = Level::new(severity_value(&caps[severity]))?;
    let kind = kind_from_name(&caps[kind])?;
    let modality: Modality = caps[modality].parse()?;
    if kind.modality() != modality {
        return Err(Error::invalid(format!("{kind} does not apply to the {modality} modality")));
    }
    Ok(DegradationSpec::new(kind, level, 0))
}

fn extract(t: &Compiled, caps: &Captures) -> Result<Vec<DegradationSpec>> {
    match t.template.arity {
        Arity::Single => Ok(vec![clause(caps, "modality", "severity", "kind")?]),
        Arity::CompositeTwo => Ok(vec![
            clause(caps, "modality_a", "severity_a", "kind_a")?,
            clause(caps, "modality_b", "severity_b", "kind_b")?,
        ]),
        Arity::CompositeSameModality => Ok(vec![
            clause(caps, "modality", "severity", "kind_a")?,
            clause(caps, "modality", "severity", "kind_b")?,
        ]),
    }
}

/// Parses a prompt into specs with seed 0 and parameters left to the severity map.
///
/// When several templates match, the first one whose slots all resolve wins. If every matching
/// template fails on a slot, the first such error is returned.
pub fn parse_prompt(text: &str) -> Result<Vec<DegradationSpec>> {
    let input = normalize(text);
    let mut first_err = None;
    for t in &bank().compiled {
        if let Some(caps) = t.regex.captures(&input) {
            match extract(t, &caps) {
                Ok(specs) => return Ok(specs),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
    }
    Err(first_err.unwrap_or_else(|| nearest(&input)))
}

fn nearest(input: &str) -> Error {
    let lower = input.to_lowercase();
    let best = template_bank()
        .iter()
        .map(|t| (strsim::normalized_levenshtein(&lower, &t.pattern.to_lowercase()), t))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, t)| t)
        .expect("bank is not empty");
    Error::PromptParse { nearest_id: best.id.clone(), nearest_pattern: best.pattern.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degrade::DegradationKind;

    fn spec(kind: DegradationKind, level: i64) -> DegradationSpec {
        DegradationSpec::new(kind, Level::new(level).unwrap(), 0)
    }

    #[test]
    fn canonical_single() {
        let s = render_prompt(&[spec(DegradationKind::Rain, 4)], &TemplateChoice::Canonical).unwrap();
        assert_eq!(
            s,
            "We are performing infrared and visible image fusion, where the visible modality suffers from a grade-4 rain."
        );
    }

    #[test]
    fn canonical_composite() {
        let specs = [spec(DegradationKind::LowLight, 6), spec(DegradationKind::StripeNoise, 8)];
        let s = render_prompt(&specs, &TemplateChoice::Canonical).unwrap();
        assert_eq!(
            s,
            "We are performing infrared and visible image fusion. Please handle a grade-6 low-light in the visible \
             modality, and a grade-8 stripe noise in the infrared modality."
        );
        assert_eq!(parse_prompt(&s).unwrap(), specs);
    }

    #[test]
    fn canonical_same_modality() {
        let specs = [spec(DegradationKind::LowLight, 5), spec(DegradationKind::Haze, 5)];
        let s = render_prompt(&specs, &TemplateChoice::Id(CANONICAL_SAME_MODALITY.into())).unwrap();
        assert_eq!(
            s,
            "We are performing infrared and visible image fusion. Please address level-5 low-light and haze in the \
             visible modality."
        );
        assert_eq!(parse_prompt(&s).unwrap(), specs);
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(render_prompt(&[], &TemplateChoice::Canonical), Err(Error::UnsupportedArity(0))));
        let three = [spec(DegradationKind::Rain, 1), spec(DegradationKind::Blur, 2), spec(DegradationKind::LowContrast, 3)];
        assert!(matches!(render_prompt(&three, &TemplateChoice::Seeded(1)), Err(Error::UnsupportedArity(3))));
        let mixed = [spec(DegradationKind::Rain, 2), spec(DegradationKind::LowContrast, 2)];
        assert!(render_prompt(&mixed, &TemplateChoice::Id(CANONICAL_SAME_MODALITY.into())).is_err());
        let one = [spec(DegradationKind::Rain, 2)];
        assert!(render_prompt(&one, &TemplateChoice::Id(CANONICAL_COMPOSITE.into())).is_err());
        assert!(render_prompt(&one, &TemplateChoice::Id("nope".into())).is_err());
    }

    #[test]
    fn seeded_is_deterministic_and_varies() {
        let specs = [spec(DegradationKind::Haze, 7)];
        let a = render_prompt(&specs, &TemplateChoice::Seeded(5)).unwrap();
        assert_eq!(a, render_prompt(&specs, &TemplateChoice::Seeded(5)).unwrap());
        let distinct: std::collections::HashSet<_> =
            (0..50).map(|s| render_prompt(&specs, &TemplateChoice::Seeded(s)).unwrap()).collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn bank_shape() {
        let bank = template_bank();
        assert!(bank.len() >= 100);
        let ids: std::collections::HashSet<_> = bank.iter().map(|t| &t.id).collect();
        assert_eq!(ids.len(), bank.len());
        let patterns: std::collections::HashSet<_> = bank.iter().map(|t| &t.pattern).collect();
        assert_eq!(patterns.len(), bank.len());
        for arity in [Arity::Single, Arity::CompositeTwo, Arity::CompositeSameModality] {
            assert!(bank.iter().any(|t| t.arity == arity));
        }
        assert_eq!(bank_version(), 1);
    }

    #[test]
    fn every_template_round_trips_every_kind() {
        let vis: Vec<_> = DegradationKind::ALL.iter().copied().filter(|k| k.modality() == Modality::Visible).collect();
        let irs: Vec<_> = DegradationKind::ALL.iter().copied().filter(|k| k.modality() == Modality::Infrared).collect();
        for t in template_bank() {
            for (i, &ka) in DegradationKind::ALL.iter().enumerate() {
                let la = (i % 10) as i64 + 1;
                let specs = match t.arity {
                    Arity::Single => vec![spec(ka, la)],
                    Arity::CompositeTwo => {
                        let pool = if ka.modality() == Modality::Visible { &irs } else { &vis };
                        vec![spec(ka, la), spec(pool[i % pool.len()], 11 - la)]
                    }
                    Arity::CompositeSameModality => {
                        let pool = if ka.modality() == Modality::Visible { &vis } else { &irs };
                        let kb = pool[(i + 1) % pool.len()];
                        vec![spec(ka, la), spec(kb, la)]
                    }
                };
                let text = render_with(t, &specs).unwrap();
                assert_eq!(parse_prompt(&text).unwrap(), specs, "{}: {text}", t.id);
            }
        }
    }

    #[test]
    fn case_whitespace_and_words() {
        let text = "  we ARE performing infrared and   visible image fusion,\twhere the Visible modality suffers from \
                    a grade-six LOW LIGHT  ";
        assert_eq!(parse_prompt(text).unwrap(), vec![spec(DegradationKind::LowLight, 6)]);
    }

    #[test]
    fn level_out_of_range() {
        let text = "We are performing infrared and visible image fusion, where the visible modality suffers from a grade-11 haze.";
        assert!(matches!(parse_prompt(text), Err(Error::LevelOutOfRange(11))));
    }

    #[test]
    fn unknown_kind() {
        let text = "We are performing infrared and visible image fusion, where the visible modality suffers from a grade-3 snow.";
        assert!(matches!(parse_prompt(text), Err(Error::UnknownKind(k)) if k == "snow"));
    }

    #[test]
    fn free_text_gets_nearest_template() {
        match parse_prompt("We are performing infrared and visible image fusion, the visible one has rain") {
            Err(Error::PromptParse { nearest_id, nearest_pattern }) => {
                assert!(find_template(&nearest_id).is_some());
                assert!(nearest_pattern.contains("{"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn modality_mismatch_rejected() {
        let text = "We are performing infrared and visible image fusion, where the visible modality suffers from a grade-3 stripe noise.";
        assert!(matches!(parse_prompt(text), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn anchors_cover_training_levels() {
        let levels: Vec<u8> = SEVERITY_ANCHORS.iter().map(|(l, _)| *l).collect();
        assert_eq!(levels, [1, 4, 7, 10]);
    }
}
