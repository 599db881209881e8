use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Subcommand};
use degradekit::dataset::{self, DatasetManifest, SynthConfig};
use degradekit::degrade::{compose, DegradationKind, DegradationSpec, Level, SideMaps};
use degradekit::imagekit::io::{load_gray, load_png, load_rgb, save_png};
use degradekit::imagekit::dft2;
use degradekit::losses::{evaluate, LossWeights};
use degradekit::prompts::{self, TemplateChoice};
use degradekit::signatures::{signature_with_bins, DEFAULT_RADIAL_BINS};
use degradekit::{derive_seed, Error, Result};
use log::info;
use serde_json::Value;

use crate::Format;

type Outcome = Result<ExitCode>;

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["spec", "prompt"])))]
pub struct DegradeArgs {
    /// Clean infrared image (converted to gray).
    #[arg(long)]
    ir: PathBuf,
    /// Clean visible image (converted to RGB).
    #[arg(long)]
    vi: PathBuf,
    /// Spec JSON (object or array), inline or as a file path.
    #[arg(long)]
    spec: Option<String>,
    /// Degradation prompt text.
    #[arg(long)]
    prompt: Option<String>,
    /// Seed for specs that do not carry their own.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Illumination map for the visible image (gray PNG).
    #[arg(long)]
    illumination: Option<PathBuf>,
    /// Depth map for the visible image (gray PNG).
    #[arg(long)]
    depth: Option<PathBuf>,
    /// Output directory for ir.png, vi.png and spec.json.
    #[arg(long)]
    out: PathBuf,
}

fn seed_for(base: u64, kind: DegradationKind) -> u64 {
    derive_seed(base, &[kind.id()])
}

// Specs without an explicit "seed" take one derived from --seed.
fn specs_from_json(text: &str, base: u64) -> Result<Vec<DegradationSpec>> {
    let trimmed = text.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| Error::Io { path: text.into(), source: e })?
    };
    let value: Value = serde_json::from_str(&text)?;
    let items = match value {
        Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|item| {
            let explicit = item.get("seed").is_some();
            let mut spec: DegradationSpec = serde_json::from_value(item)?;
            if !explicit {
                spec.seed = seed_for(base, spec.kind);
            }
            Ok(spec)
        })
        .collect()
}

pub fn degrade(args: DegradeArgs) -> Outcome {
    let specs = match (&args.spec, &args.prompt) {
        (Some(spec), _) => specs_from_json(spec, args.seed)?,
        (None, Some(text)) => prompts::parse_prompt(text)?
            .into_iter()
            .map(|mut s| {
                s.seed = seed_for(args.seed, s.kind);
                s
            })
            .collect(),
        (None, None) => unreachable!("clap enforces one source"),
    };
    let ir = load_gray(&args.ir)?;
    let vi = load_rgb(&args.vi)?;
    let maps = SideMaps {
        illumination: args.illumination.as_deref().map(load_gray).transpose()?,
        depth: args.depth.as_deref().map(load_gray).transpose()?,
    };
    let (ir_out, vi_out) = compose(&ir, &vi, &specs, &maps)?;
    create_dir(&args.out)?;
    save_png(&ir_out, args.out.join("ir.png"))?;
    save_png(&vi_out, args.out.join("vi.png"))?;
    let resolved: Vec<DegradationSpec> = specs.iter().map(|s| s.clone().with_params(s.resolved_params())).collect();
    let prompt = if resolved.is_empty() {
        Value::Null
    } else {
        Value::String(prompts::render_prompt(&resolved, &TemplateChoice::Canonical)?)
    };
    let doc = serde_json::json!({ "specs": resolved, "prompt": prompt });
    write_file(&args.out.join("spec.json"), &serde_json::to_string_pretty(&doc)?)?;
    info!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct SynthArgs {
    /// Synthesis config (.toml or .json).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn synth(args: SynthArgs) -> Outcome {
    let mut cfg = SynthConfig::from_path(&args.config)?;
    if let Some(out) = args.out {
        cfg.output = out;
    }
    let scan = dataset::scan_pairs(&cfg.input)?;
    let manifest = dataset::synthesize(&scan, &cfg)?;
    println!("records={} skipped={}", manifest.records().len(), manifest.body.skipped.len());
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Path to manifest.json.
    #[arg(long)]
    manifest: PathBuf,
    /// Dataset root; defaults to the manifest's directory.
    #[arg(long)]
    root: Option<PathBuf>,
    /// Fraction of records to regenerate and compare.
    #[arg(long, default_value_t = 1.0)]
    fraction: f64,
}

/// Exit 0 when every check passes, 1 otherwise; the report goes to stdout as JSON.
pub fn verify(args: VerifyArgs) -> Outcome {
    let manifest = DatasetManifest::read(&args.manifest)?;
    let root = args
        .root
        .unwrap_or_else(|| args.manifest.parent().map(Path::to_path_buf).unwrap_or_default());
    let report = dataset::verify(&manifest, &root, args.fraction)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Args)]
pub struct MetricsArgs {
    #[arg(long)]
    fused: PathBuf,
    #[arg(long)]
    ir: PathBuf,
    #[arg(long)]
    vi: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

pub fn metrics(args: MetricsArgs) -> Outcome {
    let fused = load_png(&args.fused)?;
    let ir = load_gray(&args.ir)?;
    let vi = load_png(&args.vi)?;
    let e = evaluate(&fused, &ir, &vi, &LossWeights::default())?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string(&e)?),
        Format::Csv => {
            println!("{}", degradekit::losses::FusionEvaluation::CSV_HEADER);
            println!("{}", e.to_csv_row());
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output PNG for the centred log-magnitude spectrum.
    #[arg(long)]
    out: PathBuf,
    /// Signature JSON path; defaults to the output path with a .json extension.
    #[arg(long)]
    signature: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RADIAL_BINS)]
    bins: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

pub fn spectrum(args: SpectrumArgs) -> Outcome {
    let img = load_gray(&args.input)?;
    let spec = dft2(&img)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    save_png(&spec.centered_log_magnitude(), &args.out)?;
    let sig = signature_with_bins(&img, args.bins)?;
    let (ext, text) = match args.format {
        Format::Json => ("json", sig.to_json()?),
        Format::Csv => ("csv", format!("{}\n{}\n", degradekit::signatures::SignatureVector::csv_header(args.bins), sig.to_csv_row())),
    };
    let path = args.signature.unwrap_or_else(|| args.out.with_extension(ext));
    write_file(&path, &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Subcommand)]
pub enum PromptCommand {
    /// Render specs into a prompt.
    Render {
        /// Spec JSON (object or array), inline or as a file path.
        #[arg(long, conflicts_with_all = ["kind", "level"])]
        spec: Option<String>,
        /// Kind id or display name; repeat for a composite.
        #[arg(long)]
        kind: Vec<String>,
        /// Level per --kind.
        #[arg(long)]
        level: Vec<i64>,
        /// Template id; the canonical template is used when neither this nor --seed is given.
        #[arg(long, conflicts_with = "seed")]
        template: Option<String>,
        /// Seeded pick from the template bank.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse a prompt into specs (JSON on stdout).
    Parse { text: String },
    /// List the template bank as JSON.
    Templates,
}

pub fn prompt(cmd: PromptCommand) -> Outcome {
    match cmd {
        PromptCommand::Render { spec, kind, level, template, seed } => {
            let specs = match spec {
                Some(s) => specs_from_json(&s, 0)?,
                None => {
                    if kind.len() != level.len() {
                        return Err(Error::InvalidArgument("give one --level per --kind".into()));
                    }
                    kind.iter()
                        .zip(&level)
                        .map(|(k, &l)| Ok(DegradationSpec::new(prompts::kind_from_name(k)?, Level::new(l)?, 0)))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let choice = match (template, seed) {
                (Some(id), _) => TemplateChoice::Id(id),
                (None, Some(s)) => TemplateChoice::Seeded(s),
                (None, None) => TemplateChoice::Canonical,
            };
            println!("{}", prompts::render_prompt(&specs, &choice)?);
        }
        PromptCommand::Parse { text } => {
            let specs = prompts::parse_prompt(&text)?;
            println!("{}", serde_json::to_string_pretty(&specs)?);
        }
        PromptCommand::Templates => {
            println!("{}", serde_json::to_string_pretty(prompts::template_bank())?);
        }
    }
    Ok(ExitCode::SUCCESS)
}
