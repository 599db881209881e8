use std::path::Path;

use super::*;
use crate::degrade::DegradationKind;
use crate::imagekit::io::{load_png, save_png};
use crate::prompts::parse_prompt;
use crate::Error;

fn fixture(dir: &Path, pairs: usize) -> SynthConfig {
    write_synthetic_pairs(dir.join("in"), pairs, 24, 24, 3).unwrap();
    SynthConfig::new(dir.join("in"), dir.join("out"))
}

#[test]
fn product_count_and_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture(tmp.path(), 5);
    let m = synthesize_from_config(&cfg).unwrap();
    assert_eq!(m.records().len(), 240);
    assert_eq!(m.body.expected_records(), 240);
    assert_eq!(m.body.test_count(), 24);
    let r = &m.records()[0];
    assert_eq!(r.key, "pair_000/blur/01");
    let expected: std::path::PathBuf = [r.split.as_str(), "blur", "1", "pair_000_ir.png"].iter().collect();
    assert_eq!(r.outputs.ir, expected);
    assert!(cfg.output.join(MANIFEST_FILE).is_file());
    for r in m.records() {
        let parsed = parse_prompt(&r.prompt).unwrap();
        assert_eq!(parsed.len(), r.specs.len());
        for (p, s) in parsed.iter().zip(&r.specs) {
            assert_eq!((p.kind, p.level, p.modality), (s.kind, s.level, s.modality));
        }
    }
    let read = DatasetManifest::read(cfg.output.join(MANIFEST_FILE)).unwrap();
    assert_eq!(read, m);
}

#[test]
fn reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 2);
    cfg.kinds = vec![DegradationKind::Rain, DegradationKind::StripeNoise, DegradationKind::LowLightNoise];
    let a = synthesize_from_config(&cfg).unwrap();
    let first = std::fs::read(cfg.output.join(&a.records()[3].outputs.vi)).unwrap();
    cfg.output = tmp.path().join("out2");
    let b = synthesize_from_config(&cfg).unwrap();
    assert_eq!(a.body_sha256, b.body_sha256);
    assert_eq!(a.body, b.body);
    assert_eq!(first, std::fs::read(cfg.output.join(&b.records()[3].outputs.vi)).unwrap());
    cfg.global_seed = 1;
    cfg.output = tmp.path().join("out3");
    assert_ne!(synthesize_from_config(&cfg).unwrap().body_sha256, a.body_sha256);
}

#[test]
fn fresh_dataset_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture(tmp.path(), 2);
    let m = synthesize_from_config(&cfg).unwrap();
    let report = verify(&m, &cfg.output, 1.0).unwrap();
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.regenerated, 96);
    let sampled = verify(&m, &cfg.output, 0.1).unwrap();
    assert_eq!(sampled.regenerated, 10);
    assert!(verify(&m, &cfg.output, 0.0).is_err());
}

#[test]
fn corrupted_png_flags_only_its_record() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 2);
    cfg.kinds = vec![DegradationKind::Haze, DegradationKind::LowContrast];
    let m = synthesize_from_config(&cfg).unwrap();
    let victim = &m.records()[5];
    let path = cfg.output.join(&victim.outputs.vi);
    let mut img = load_png(&path).unwrap();
    let v = img.get(3, 3, 1);
    img.set(3, 3, 1, if v > 0.5 { 0.0 } else { 1.0 });
    save_png(&img, &path).unwrap();
    let report = verify(&m, &cfg.output, 1.0).unwrap();
    assert_eq!(report.flagged_keys(), [victim.key.as_str()]);

    std::fs::write(&path, b"garbage").unwrap();
    let report = verify(&m, &cfg.output, 1.0).unwrap();
    assert_eq!(report.flagged_keys(), [victim.key.as_str()]);
}

#[test]
fn edited_level_fails_spec_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 1);
    cfg.kinds = vec![DegradationKind::Blur];
    let mut m = synthesize_from_config(&cfg).unwrap();
    m.body.records[1].specs[0].level = crate::degrade::Level::new(9).unwrap();
    let report = verify(&m, &cfg.output, 1.0).unwrap();
    let key = m.records()[1].key.clone();
    assert_eq!(report.flagged_keys(), [key.as_str()]);
    assert!(report.findings.iter().any(|f| f.problem == "spec hash mismatch"));
    assert!(!report.body_hash_ok);
}

#[test]
fn missing_file_is_enumerated() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 1);
    cfg.kinds = vec![DegradationKind::Rain];
    let m = synthesize_from_config(&cfg).unwrap();
    std::fs::remove_file(cfg.output.join(&m.records()[2].outputs.ir)).unwrap();
    let report = verify(&m, &cfg.output, 0.25).unwrap();
    assert!(report.findings.iter().any(|f| f.key == m.records()[2].key && f.problem.starts_with("missing file")));
}

#[test]
fn unreadable_pair_is_skipped() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 3);
    cfg.kinds = vec![DegradationKind::Blur];
    std::fs::write(tmp.path().join("in/vi/pair_001.png"), b"broken").unwrap();
    let m = synthesize_from_config(&cfg).unwrap();
    assert_eq!(m.body.pairs.len(), 2);
    assert_eq!(m.body.skipped.len(), 1);
    assert_eq!(m.body.skipped[0].id, "pair_001");
    assert_eq!(m.records().len(), 8);
}

#[test]
fn write_failure_leaves_partial_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 2);
    cfg.kinds = vec![DegradationKind::Blur, DegradationKind::Haze];
    cfg.test_fraction = 0.25;
    std::fs::create_dir_all(&cfg.output).unwrap();
    // A plain file where the test split directory should go.
    std::fs::write(cfg.output.join("test"), b"").unwrap();
    match synthesize_from_config(&cfg) {
        Err(Error::PartialSynthesis { written, failed, manifest: Some(path) }) => {
            assert_eq!((written, failed), (12, 4));
            let m = DatasetManifest::read(path).unwrap();
            assert!(m.body.partial);
            assert!(m.records().iter().all(|r| r.split == Split::Train));
            assert!(!verify(&m, &cfg.output, 1.0).unwrap().count_ok);
        }
        other => panic!("expected partial synthesis, got {other:?}"),
    }
}

#[test]
fn composites_follow_their_count_formula() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path(), 2);
    cfg.singles = false;
    cfg.composites = vec![
        [DegradationKind::RainHaze, DegradationKind::RandomNoise],
        [DegradationKind::LowLight, DegradationKind::Blur],
    ];
    cfg.prompt_style = PromptStyle::Varied;
    let m = synthesize_from_config(&cfg).unwrap();
    assert_eq!(m.records().len(), 2 * 2 * 4);
    assert!(m.records().iter().all(|r| r.specs.len() == 2));
    assert!(m.records()[0].key.contains("rain_haze+random_noise") || m.records()[0].key.contains("low_light+blur"));
    assert!(verify(&m, &cfg.output, 1.0).unwrap().passed());
}
