use std::collections::HashSet;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use super::config::{PromptStyle, SynthConfig};
use super::manifest::{
    float_digest, spec_hash, DatasetManifest, KindEntry, ManifestBody, OutputPaths, PairEntry, Record, Split,
    MANIFEST_FILE,
};
use super::pairs::{scan_pairs, CleanPair, PairScan, SkippedPair};
use super::split::{assign, SplitItem};
use crate::degrade::{compose, DegradationKind, DegradationSpec, Level, SideMaps};
use crate::imagekit::io::save_png;
use crate::prompts::{bank_version, render_prompt, TemplateChoice};
use crate::{derive_seed, Error, Image, Result};

/// Seed of one record, from the global seed and the record's identity.
pub fn record_seed(global_seed: u64, pair_id: &str, kinds: &[DegradationKind], level: Level) -> u64 {
    derive_seed(global_seed, &[pair_id, &stratum(kinds), &level.get().to_string()])
}

fn stratum(kinds: &[DegradationKind]) -> String {
    kinds.iter().map(|k| k.id()).collect::<Vec<_>>().join("+")
}

pub(crate) fn record_specs(seed: u64, kinds: &[DegradationKind], level: Level) -> Vec<DegradationSpec> {
    kinds
        .iter()
        .map(|&k| {
            let spec = DegradationSpec::new(k, level, derive_seed(seed, &[k.id()]));
            let params = spec.resolved_params();
            spec.with_params(params)
        })
        .collect()
}

pub(crate) fn degrade_pair(ir: &Image, vi: &Image, specs: &[DegradationSpec]) -> Result<(Image, Image)> {
    compose(ir, vi, specs, &SideMaps::none())
}

struct Job {
    pair: usize,
    kinds: Vec<DegradationKind>,
    level: Level,
    seed: u64,
    key: String,
    stratum: String,
}

fn build_jobs(pairs: &[CleanPair], cfg: &SynthConfig) -> Result<Vec<Job>> {
    let mut combos: Vec<Vec<DegradationKind>> = Vec::new();
    if cfg.singles {
        combos.extend(cfg.kinds.iter().map(|&k| vec![k]));
    }
    combos.extend(cfg.composites.iter().map(|c| c.to_vec()));
    let mut jobs = Vec::new();
    let mut seeds = HashSet::new();
    for (pi, pair) in pairs.iter().enumerate() {
        for kinds in &combos {
            for &level in &cfg.levels {
                let seed = record_seed(cfg.global_seed, &pair.id, kinds, level);
                let stratum = stratum(kinds);
                let key = format!("{}/{}/{:02}", pair.id, stratum, level.get());
                if !seeds.insert(seed) {
                    return Err(Error::invalid(format!("record seed collision at {key}; change global_seed")));
                }
                jobs.push(Job { pair: pi, kinds: kinds.clone(), level, seed, key, stratum });
            }
        }
    }
    Ok(jobs)
}

fn write_record(
    root: &Path,
    job: &Job,
    split: Split,
    pair: &CleanPair,
    ir: &Image,
    vi: &Image,
    style: PromptStyle,
) -> Result<Record> {
    let specs = record_specs(job.seed, &job.kinds, job.level);
    let choice = match style {
        PromptStyle::Canonical => TemplateChoice::Canonical,
        PromptStyle::Varied => TemplateChoice::Seeded(job.seed),
    };
    let prompt = render_prompt(&specs, &choice)?;
    let (ir_out, vi_out) = degrade_pair(ir, vi, &specs)?;
    let dir: PathBuf = [split.as_str(), &job.stratum, &job.level.get().to_string()].iter().collect();
    std::fs::create_dir_all(root.join(&dir)).map_err(|e| Error::io(root.join(&dir), e))?;
    let outputs = OutputPaths {
        ir: dir.join(format!("{}_ir.png", pair.id)),
        vi: dir.join(format!("{}_vi.png", pair.id)),
    };
    save_png(&ir_out, root.join(&outputs.ir))?;
    save_png(&vi_out, root.join(&outputs.vi))?;
    Ok(Record {
        key: job.key.clone(),
        pair_id: pair.id.clone(),
        level: job.level,
        seed: job.seed,
        spec_hash: spec_hash(&specs),
        specs,
        prompt,
        split,
        outputs,
        float_digest: float_digest(&ir_out, &vi_out),
    })
}

/// Degrades every pair under every configured kind (or combination) and level, writes the images
/// and `manifest.json` under `config.output`, and returns the manifest.
///
/// Pairs that fail to load are recorded as skipped. If any record fails to write, a manifest
/// flagged `partial` is still written and [`Error::PartialSynthesis`] is returned.
pub fn synthesize(scan: &PairScan, config: &SynthConfig) -> Result<DatasetManifest> {
    config.validate()?;
    let mut skipped = scan.skipped.clone();
    let checks: Vec<_> = scan.pairs.par_iter().map(|p| p.load().map(|_| ())).collect();
    let mut pairs = Vec::new();
    for (pair, check) in scan.pairs.iter().zip(checks) {
        match check {
            Ok(()) => pairs.push(pair.clone()),
            Err(e) => {
                warn!("skipping pair {}: {e}", pair.id);
                skipped.push(SkippedPair { id: pair.id.clone(), reason: e.to_string() });
            }
        }
    }
    pairs.sort_by(|a, b| a.id.cmp(&b.id));
    skipped.sort_by(|a, b| a.id.cmp(&b.id));
    if pairs.is_empty() {
        return Err(Error::invalid("no usable clean pairs"));
    }

    let jobs = build_jobs(&pairs, config)?;
    let items: Vec<_> = jobs
        .iter()
        .map(|j| SplitItem { stratum: &j.stratum, pair_id: &pairs[j.pair].id, key: &j.key })
        .collect();
    let splits = assign(&items, config.test_fraction, config.global_seed);

    let root = &config.output;
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    info!("synthesizing {} records from {} pairs", jobs.len(), pairs.len());

    let per_pair: Vec<Vec<Result<Record>>> = pairs
        .par_iter()
        .enumerate()
        .map(|(pi, pair)| {
            let mine: Vec<usize> = (0..jobs.len()).filter(|&j| jobs[j].pair == pi).collect();
            match pair.load() {
                Ok((ir, vi)) => mine
                    .par_iter()
                    .map(|&j| write_record(root, &jobs[j], splits[j], pair, &ir, &vi, config.prompt_style))
                    .collect(),
                Err(e) => {
                    let msg = e.to_string();
                    mine.iter().map(|_| Err(Error::invalid(msg.clone()))).collect()
                }
            }
        })
        .collect();

    let mut records = Vec::with_capacity(jobs.len());
    let mut failed = 0;
    for result in per_pair.into_iter().flatten() {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                warn!("record failed: {e}");
                failed += 1;
            }
        }
    }
    records.sort_by(|a, b| a.key.cmp(&b.key));

    let mut kinds: Vec<KindEntry> = config.kinds.iter().map(|&k| KindEntry { id: k, modality: k.modality() }).collect();
    kinds.sort_by_key(|k| k.id);
    let body = ManifestBody {
        global_seed: config.global_seed,
        levels: config.levels.clone(),
        kinds,
        composites: config.composites.clone(),
        singles: config.singles,
        test_fraction: config.test_fraction,
        template_bank_version: bank_version(),
        pairs: pairs.iter().map(PairEntry::from).collect(),
        skipped,
        partial: failed > 0,
        records,
    };
    let written = body.records.len();
    let manifest = DatasetManifest::new(body);
    let path = root.join(MANIFEST_FILE);
    let saved = manifest.write(&path);
    if failed > 0 {
        return Err(Error::PartialSynthesis { written, failed, manifest: saved.ok().map(|_| path) });
    }
    saved?;
    Ok(manifest)
}

/// Scans `config.input` and synthesizes.
pub fn synthesize_from_config(config: &SynthConfig) -> Result<DatasetManifest> {
    let scan = scan_pairs(&config.input)?;
    synthesize(&scan, config)
}
