mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use degradekit::Error;

#[derive(Parser)]
#[command(name = "degradekit", version, about = "Infrared/visible degradation synthesis and fusion metrics")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Degrade one clean pair from a spec or a prompt.
    Degrade(commands::DegradeArgs),
    /// Synthesize a dataset from a TOML/JSON config.
    Synth(commands::SynthArgs),
    /// Check a synthesized dataset against its manifest.
    Verify(commands::VerifyArgs),
    /// Fusion metrics and losses for a fused image and its sources.
    Metrics(commands::MetricsArgs),
    /// Centred log-magnitude spectrum and degradation signature of an image.
    Spectrum(commands::SpectrumArgs),
    /// Render, parse or list degradation prompts.
    #[command(subcommand)]
    Prompt(commands::PromptCommand),
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Codec { .. } | Error::PartialSynthesis { .. } => 3,
        Error::PromptParse { .. } => 4,
        _ => 2,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("DEGRADEKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("DEGRADEKIT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let result = configure_threads().and_then(|()| match cli.command {
        Command::Degrade(args) => commands::degrade(args),
        Command::Synth(args) => commands::synth(args),
        Command::Verify(args) => commands::verify(args),
        Command::Metrics(args) => commands::metrics(args),
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Prompt(cmd) => commands::prompt(cmd),
    });
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
