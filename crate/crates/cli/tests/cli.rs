use std::path::Path;
use std::process::{Command, Output};

use degradekit::dataset::write_synthetic_pairs;
use degradekit::imagekit::io::{load_png, save_png};
use degradekit::Image;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degradekit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const CANONICAL: &str =
    "We are performing infrared and visible image fusion, where the visible modality suffers from a grade-4 rain.";

#[test]
fn degrade_from_prompt() {
    let tmp = tempfile::tempdir().unwrap();
    write_synthetic_pairs(tmp.path().join("in"), 1, 20, 24, 0).unwrap();
    let (ir, vi) = (tmp.path().join("in/ir/pair_000.png"), tmp.path().join("in/vi/pair_000.png"));
    let out = tmp.path().join("out");
    let r = run(&["degrade", "--ir", p(&ir), "--vi", p(&vi), "--prompt", CANONICAL, "--out", p(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("ir.png").is_file() && out.join("vi.png").is_file());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out.join("spec.json")).unwrap()).unwrap();
    assert_eq!(doc["specs"][0]["kind"], "rain");
    assert_eq!(doc["specs"][0]["level"], 4);
    assert_eq!(doc["prompt"], CANONICAL);
    // Infrared untouched by a visible-only prompt.
    assert_eq!(std::fs::read(&ir).unwrap(), std::fs::read(out.join("ir.png")).unwrap());

    // The written spec.json reproduces the same images.
    let again = tmp.path().join("again");
    let spec = serde_json::to_string(&doc["specs"]).unwrap();
    let r = run(&["degrade", "--ir", p(&ir), "--vi", p(&vi), "--spec", &spec, "--out", p(&again), "--seed", "99"]);
    assert_eq!(code(&r), 0);
    assert_eq!(std::fs::read(out.join("vi.png")).unwrap(), std::fs::read(again.join("vi.png")).unwrap());
}

#[test]
fn degrade_error_codes() {
    let tmp = tempfile::tempdir().unwrap();
    write_synthetic_pairs(tmp.path().join("in"), 1, 16, 16, 0).unwrap();
    let (ir, vi) = (tmp.path().join("in/ir/pair_000.png"), tmp.path().join("in/vi/pair_000.png"));
    let out = tmp.path().join("out");
    let r = run(&["degrade", "--ir", p(&ir), "--vi", p(&vi), "--prompt", "please fix the rain", "--out", p(&out)]);
    assert_eq!(code(&r), 4);
    assert!(String::from_utf8_lossy(&r.stderr).contains("nearest"));

    let bad = r#"{"modality":"visible","kind":"haze","level":11}"#;
    let r = run(&["degrade", "--ir", p(&ir), "--vi", p(&vi), "--spec", bad, "--out", p(&out)]);
    assert_eq!(code(&r), 2);

    let r = run(&["degrade", "--ir", "/nonexistent/ir.png", "--vi", p(&vi), "--prompt", CANONICAL, "--out", p(&out)]);
    assert_eq!(code(&r), 3);

    let r = run(&["degrade", "--ir", p(&ir), "--vi", p(&vi), "--out", p(&out)]);
    assert_eq!(code(&r), 2, "missing --spec/--prompt is a usage error");
}

#[test]
fn synth_and_verify() {
    let tmp = tempfile::tempdir().unwrap();
    write_synthetic_pairs(tmp.path().join("in"), 5, 16, 16, 1).unwrap();
    let cfg = tmp.path().join("synth.toml");
    std::fs::write(&cfg, "input = \"in\"\noutput = \"out\"\nglobal_seed = 4\n").unwrap();
    let r = run(&["synth", "--config", p(&cfg)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(stdout(&r).trim(), "records=240 skipped=0");
    let manifest = tmp.path().join("out/manifest.json");
    let first: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();

    let r = run(&["synth", "--config", p(&cfg), "--out", p(&tmp.path().join("out2"))]);
    assert_eq!(code(&r), 0);
    let second: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out2/manifest.json")).unwrap()).unwrap();
    assert_eq!(first["body_sha256"], second["body_sha256"]);

    let r = run(&["verify", "--manifest", p(&manifest), "--fraction", "0.2"]);
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    let report: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(report["findings"].as_array().unwrap().len(), 0);
}

#[test]
fn synth_unknown_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("synth.toml");
    std::fs::write(&cfg, "input = \"in\"\noutput = \"out\"\nkinds = [\"blizzard\"]\n").unwrap();
    let r = run(&["synth", "--config", p(&cfg)]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("blizzard"));
}

#[test]
fn metrics_formats_agree() {
    let tmp = tempfile::tempdir().unwrap();
    write_synthetic_pairs(tmp.path().join("in"), 1, 24, 24, 2).unwrap();
    let vi = tmp.path().join("in/vi/pair_000.png");
    let ir = tmp.path().join("in/ir/pair_000.png");
    let json = run(&["metrics", "--fused", p(&vi), "--ir", p(&vi), "--vi", p(&vi)]);
    assert_eq!(code(&json), 0);
    let j: Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(j["l_int"], 0.0);

    let json = run(&["metrics", "--fused", p(&vi), "--ir", p(&ir), "--vi", p(&vi)]);
    let csv = run(&["metrics", "--fused", p(&vi), "--ir", p(&ir), "--vi", p(&vi), "--format", "csv"]);
    let j: Value = serde_json::from_str(&stdout(&json)).unwrap();
    let text = stdout(&csv);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    for (name, v) in header.iter().zip(row) {
        assert_eq!(j[name].as_f64().unwrap(), v, "{name}");
    }

    let flat = tmp.path().join("flat.png");
    save_png(&Image::filled(24, 24, 1, 0.4).unwrap(), &flat).unwrap();
    let r = run(&["metrics", "--fused", p(&flat), "--ir", p(&ir), "--vi", p(&vi)]);
    let j: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!((j["en"].as_f64(), j["sd"].as_f64()), (Some(0.0), Some(0.0)));

    let small = tmp.path().join("small.png");
    save_png(&Image::filled(20, 24, 1, 0.4).unwrap(), &small).unwrap();
    assert_eq!(code(&run(&["metrics", "--fused", p(&small), "--ir", p(&ir), "--vi", p(&vi)])), 2);
}

#[test]
fn spectrum_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let flat = tmp.path().join("flat.png");
    save_png(&Image::filled(16, 16, 1, 0.5).unwrap(), &flat).unwrap();
    let out = tmp.path().join("spec/flat_spectrum.png");
    let r = run(&["spectrum", "--input", p(&flat), "--out", p(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let img = load_png(&out).unwrap();
    let bright: Vec<usize> = (0..img.data().len()).filter(|&i| img.data()[i] > 0.0).collect();
    assert_eq!(bright, [8 * 16 + 8]);
    let sig: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let b = &sig["band_ratios"];
    let sum = b["low"].as_f64().unwrap() + b["mid"].as_f64().unwrap() + b["high"].as_f64().unwrap();
    assert!((sum - 1.0).abs() < 1e-6);

    let stripes = tmp.path().join("stripes.png");
    save_png(&Image::from_fn_gray(16, 16, |_, x| ((x * 37) % 11) as f64 / 10.0).unwrap(), &stripes).unwrap();
    let r = run(&["spectrum", "--input", p(&stripes), "--out", p(&tmp.path().join("s.png"))]);
    assert_eq!(code(&r), 0);
    let sig: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("s.json")).unwrap()).unwrap();
    assert!(sig["column_autocorr"].as_f64().unwrap() > 0.99);

    assert_eq!(code(&run(&["spectrum", "--input", "/nonexistent.png", "--out", p(&out)])), 3);
}

#[test]
fn prompt_render_and_parse() {
    let r = run(&["prompt", "render", "--kind", "low-light", "--level", "6", "--kind", "stripe noise", "--level", "8"]);
    assert_eq!(code(&r), 0);
    let text = stdout(&r).trim().to_string();
    assert_eq!(
        text,
        "We are performing infrared and visible image fusion. Please handle a grade-6 low-light in the visible \
         modality, and a grade-8 stripe noise in the infrared modality."
    );
    let r = run(&["prompt", "parse", &text]);
    assert_eq!(code(&r), 0);
    let specs: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(specs[1]["kind"], "stripe_noise");
    assert_eq!(specs[1]["level"], 8);

    assert_eq!(code(&run(&["prompt", "parse", "make it nice"])), 4);
    let seeded = run(&["prompt", "render", "--kind", "haze", "--level", "3", "--seed", "7"]);
    assert_eq!(stdout(&seeded), stdout(&run(&["prompt", "render", "--kind", "haze", "--level", "3", "--seed", "7"])));
    assert_eq!(code(&run(&["prompt", "render", "--kind", "haze", "--level", "12"])), 2);
    let bank: Value = serde_json::from_str(&stdout(&run(&["prompt", "templates"]))).unwrap();
    assert!(bank.as_array().unwrap().len() >= 100);
}

#[test]
fn thread_env_is_validated() {
    let r = Command::new(env!("CARGO_BIN_EXE_degradekit"))
        .args(["prompt", "templates"])
        .env("DEGRADEKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&r), 2);
    let r = Command::new(env!("CARGO_BIN_EXE_degradekit"))
        .args(["prompt", "templates"])
        .env("DEGRADEKIT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&r), 0);
}
