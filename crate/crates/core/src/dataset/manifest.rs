use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::pairs::{CleanPair, SkippedPair};
use crate::degrade::{DegradationKind, DegradationSpec, Level, Modality};
use crate::{Error, Image, Result};

pub const MANIFEST_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindEntry {
    pub id: DegradationKind,
    pub modality: Modality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub id: String,
    pub ir_path: PathBuf,
    pub vi_path: PathBuf,
    pub width: usize,
    pub height: usize,
}

impl From<&CleanPair> for PairEntry {
    fn from(p: &CleanPair) -> Self {
        Self { id: p.id.clone(), ir_path: p.ir_path.clone(), vi_path: p.vi_path.clone(), width: p.width, height: p.height }
    }
}

impl From<&PairEntry> for CleanPair {
    fn from(p: &PairEntry) -> Self {
        Self { id: p.id.clone(), ir_path: p.ir_path.clone(), vi_path: p.vi_path.clone(), width: p.width, height: p.height }
    }
}

/// Output files relative to the dataset root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPaths {
    pub ir: PathBuf,
    pub vi: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// `<pair>/<kind>[+<kind>]/<level>`; records are sorted by key.
    pub key: String,
    pub pair_id: String,
    pub level: Level,
    pub seed: u64,
    /// Specs with their own seeds and fully resolved parameters.
    pub specs: Vec<DegradationSpec>,
    pub prompt: String,
    pub split: Split,
    pub outputs: OutputPaths,
    /// SHA-256 of the canonical JSON of `specs`.
    pub spec_hash: String,
    /// SHA-256 of the unquantised output samples (infrared then visible, little-endian f64).
    pub float_digest: String,
}

/// Everything covered by the body hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestBody {
    pub global_seed: u64,
    pub levels: Vec<Level>,
    pub kinds: Vec<KindEntry>,
    pub composites: Vec<[DegradationKind; 2]>,
    pub singles: bool,
    pub test_fraction: f64,
    pub template_bank_version: u32,
    pub pairs: Vec<PairEntry>,
    pub skipped: Vec<SkippedPair>,
    /// Set when synthesis stopped on a write failure.
    pub partial: bool,
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: String,
    /// Seconds since the Unix epoch; excluded from the body hash.
    pub created_unix: u64,
    pub body_sha256: String,
    pub body: ManifestBody,
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn spec_hash(specs: &[DegradationSpec]) -> String {
    sha256_hex(&serde_json::to_vec(specs).expect("specs serialise"))
}

pub(crate) fn float_digest(ir: &Image, vi: &Image) -> String {
    let mut h = Sha256::new();
    for v in ir.data().iter().chain(vi.data()) {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

impl ManifestBody {
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("manifest body serialises"))
    }

    /// `|pairs| × (|kinds| + |composites|) × |levels|`, with kinds counted only when singles are on.
    pub fn expected_records(&self) -> usize {
        let singles = if self.singles { self.kinds.len() } else { 0 };
        self.pairs.len() * (singles + self.composites.len()) * self.levels.len()
    }

    pub fn test_count(&self) -> usize {
        self.records.iter().filter(|r| r.split == Split::Test).count()
    }
}

impl DatasetManifest {
    pub fn new(body: ManifestBody) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self { version: MANIFEST_VERSION.into(), created_unix, body_sha256: body.hash(), body }
    }

    pub fn records(&self) -> &[Record] {
        &self.body.records
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
