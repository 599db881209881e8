use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{float_digest, spec_hash, DatasetManifest, Record, Split};
use super::pairs::CleanPair;
use super::synth::{degrade_pair, record_seed};
use crate::degrade::DegradationKind;
use crate::imagekit::io::{load_png, quantized_bytes};
use crate::{derive_seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub key: String,
    pub problem: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: usize,
    pub expected_records: usize,
    /// Records regenerated and compared against their stored images.
    pub regenerated: usize,
    pub test_records: usize,
    pub expected_test_records: f64,
    pub body_hash_ok: bool,
    pub count_ok: bool,
    pub split_ok: bool,
    pub findings: Vec<Finding>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.body_hash_ok && self.count_ok && self.split_ok && self.findings.is_empty()
    }

    /// Keys of records with at least one finding, deduplicated.
    pub fn flagged_keys(&self) -> Vec<&str> {
        let mut keys: Vec<&str> = self.findings.iter().map(|f| f.key.as_str()).collect();
        keys.dedup();
        keys
    }
}

fn finding(key: &str, problem: impl Into<String>) -> Finding {
    Finding { key: key.to_string(), problem: problem.into() }
}

fn static_checks(m: &DatasetManifest, root: &Path, r: &Record) -> Vec<Finding> {
    let mut out = Vec::new();
    if spec_hash(&r.specs) != r.spec_hash {
        out.push(finding(&r.key, "spec hash mismatch"));
    }
    let kinds: Vec<DegradationKind> = r.specs.iter().map(|s| s.kind).collect();
    if record_seed(m.body.global_seed, &r.pair_id, &kinds, r.level) != r.seed {
        out.push(finding(&r.key, "record seed does not match its pair, kinds and level"));
    }
    for s in &r.specs {
        if s.level != r.level {
            out.push(finding(&r.key, format!("{} has level {} but the record has {}", s.kind, s.level.get(), r.level.get())));
        }
        if s.seed != derive_seed(r.seed, &[s.kind.id()]) {
            out.push(finding(&r.key, format!("{} seed does not derive from the record seed", s.kind)));
        }
    }
    for p in [&r.outputs.ir, &r.outputs.vi] {
        if !root.join(p).is_file() {
            out.push(finding(&r.key, format!("missing file {}", p.display())));
        }
    }
    out
}

fn regenerate(root: &Path, pair: &CleanPair, records: &[&Record]) -> Vec<Finding> {
    let (ir, vi) = match pair.load() {
        Ok(v) => v,
        Err(e) => return records.iter().map(|r| finding(&r.key, format!("clean pair unreadable: {e}"))).collect(),
    };
    records
        .par_iter()
        .flat_map_iter(|r| {
            let mut out = Vec::new();
            let (ir_out, vi_out) = match degrade_pair(&ir, &vi, &r.specs) {
                Ok(v) => v,
                Err(e) => return vec![finding(&r.key, format!("cannot regenerate: {e}"))],
            };
            if float_digest(&ir_out, &vi_out) != r.float_digest {
                out.push(finding(&r.key, "regenerated floats differ from the recorded digest"));
            }
            for (img, rel) in [(&ir_out, &r.outputs.ir), (&vi_out, &r.outputs.vi)] {
                match load_png(root.join(rel)) {
                    Ok(stored) if stored.channels() == img.channels() && stored.same_size(img) => {
                        if quantized_bytes(&stored) != quantized_bytes(img) {
                            out.push(finding(&r.key, format!("{} differs from regenerated pixels", rel.display())));
                        }
                    }
                    Ok(_) => out.push(finding(&r.key, format!("{} has the wrong shape", rel.display()))),
                    Err(e) => out.push(finding(&r.key, format!("{} unreadable: {e}", rel.display()))),
                }
            }
            out
        })
        .collect()
}

/// Checks the manifest against the files under `root`.
///
/// Hashes, seeds and file presence are checked for every record. A `fraction` of records, picked
/// by a seeded ranking, is regenerated from the clean pairs and compared bit-exactly with the stored
/// PNGs and the recorded float digests.
pub fn verify(manifest: &DatasetManifest, root: impl AsRef<Path>, fraction: f64) -> Result<VerificationReport> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("verify fraction {fraction} outside (0, 1]")));
    }
    let root = root.as_ref();
    let body = &manifest.body;
    let mut findings: Vec<Finding> = body.records.par_iter().flat_map_iter(|r| static_checks(manifest, root, r)).collect();

    let n = body.records.len();
    let take = ((fraction * n as f64).ceil() as usize).min(n);
    let mut ranked: Vec<&Record> = body.records.iter().collect();
    ranked.sort_by_key(|r| (derive_seed(body.global_seed, &["verify", &r.key]), r.key.clone()));
    ranked.truncate(take);

    let pairs: HashMap<&str, CleanPair> = body.pairs.iter().map(|p| (p.id.as_str(), CleanPair::from(p))).collect();
    let mut by_pair: HashMap<&str, Vec<&Record>> = HashMap::new();
    for r in ranked {
        match pairs.get(r.pair_id.as_str()) {
            Some(_) => by_pair.entry(r.pair_id.as_str()).or_default().push(r),
            None => findings.push(finding(&r.key, format!("pair {} is not listed in the manifest", r.pair_id))),
        }
    }
    let groups: Vec<_> = by_pair.into_iter().collect();
    findings.extend(groups.par_iter().flat_map_iter(|(id, recs)| regenerate(root, &pairs[id], recs)).collect::<Vec<_>>());
    findings.sort_by(|a, b| a.key.cmp(&b.key).then(a.problem.cmp(&b.problem)));

    let test_records = body.records.iter().filter(|r| r.split == Split::Test).count();
    let expected_test_records = body.test_fraction * n as f64;
    Ok(VerificationReport {
        records: n,
        expected_records: body.expected_records(),
        regenerated: take,
        test_records,
        expected_test_records,
        body_hash_ok: body.hash() == manifest.body_sha256,
        count_ok: !body.partial && n == body.expected_records(),
        split_ok: (test_records as f64 - expected_test_records).abs() <= 1.0,
        findings,
    })
}
