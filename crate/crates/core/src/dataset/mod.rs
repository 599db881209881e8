//! Seeded synthesis of degraded IR/VI datasets from a directory of clean pairs.
//!
//! Input layout is `input/ir/<id>.png` and `input/vi/<id>.png`. Output layout is
//! `out/<split>/<kind>/<level>/<id>_<ir|vi>.png` plus `out/manifest.json`.

mod config;
mod manifest;
mod pairs;
mod split;
mod synth;
mod verify;

pub use config::{PromptStyle, SynthConfig};
pub use manifest::{
    DatasetManifest, KindEntry, ManifestBody, OutputPaths, PairEntry, Record, Split, MANIFEST_FILE, MANIFEST_VERSION,
};
pub use pairs::{scan_pairs, write_synthetic_pairs, CleanPair, PairScan, SkippedPair};
pub use synth::{record_seed, synthesize, synthesize_from_config};
pub use verify::{verify, Finding, VerificationReport};

#[cfg(test)]
mod tests;
