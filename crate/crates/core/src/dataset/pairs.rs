use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::imagekit::io::{load_gray, load_rgb, save_png};
use crate::{Error, Image, Result};

/// A registered clean infrared/visible pair whose images decode and share dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanPair {
    pub id: String,
    pub ir_path: PathBuf,
    pub vi_path: PathBuf,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairScan {
    pub pairs: Vec<CleanPair>,
    pub skipped: Vec<SkippedPair>,
}

impl CleanPair {
    /// Decodes both images to check them.
    pub fn open(id: impl Into<String>, ir_path: impl Into<PathBuf>, vi_path: impl Into<PathBuf>) -> Result<Self> {
        let (id, ir_path, vi_path) = (id.into(), ir_path.into(), vi_path.into());
        let ir = load_gray(&ir_path)?;
        let vi = load_rgb(&vi_path)?;
        if !ir.same_size(&vi) {
            return Err(Error::invalid(format!(
                "pair {id}: infrared is {}x{}, visible is {}x{}",
                ir.height(),
                ir.width(),
                vi.height(),
                vi.width()
            )));
        }
        Ok(Self { id, ir_path, vi_path, width: ir.width(), height: ir.height() })
    }

    /// Infrared as gray, visible as RGB.
    pub fn load(&self) -> Result<(Image, Image)> {
        let ir = load_gray(&self.ir_path)?;
        let vi = load_rgb(&self.vi_path)?;
        if ir.height() != self.height || ir.width() != self.width || !ir.same_size(&vi) {
            return Err(Error::invalid(format!("pair {} changed size since it was registered", self.id)));
        }
        Ok((ir, vi))
    }
}

fn png_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if let (true, Some(stem)) = (is_png, path.file_stem().and_then(|s| s.to_str())) {
            out.insert(stem.to_string(), path.clone());
        }
    }
    Ok(out)
}

/// Matches `dir/ir/*.png` with `dir/vi/*.png` by file stem. Unmatched or undecodable pairs are
/// reported as skipped.
pub fn scan_pairs(dir: impl AsRef<Path>) -> Result<PairScan> {
    let dir = dir.as_ref();
    let ir = png_stems(&dir.join("ir"))?;
    let vi = png_stems(&dir.join("vi"))?;
    let mut scan = PairScan::default();
    for (id, ir_path) in &ir {
        let Some(vi_path) = vi.get(id) else {
            scan.skipped.push(SkippedPair { id: id.clone(), reason: "no visible counterpart".into() });
            continue;
        };
        match CleanPair::open(id, ir_path, vi_path) {
            Ok(p) => scan.pairs.push(p),
            Err(e) => scan.skipped.push(SkippedPair { id: id.clone(), reason: e.to_string() }),
        }
    }
    for id in vi.keys().filter(|id| !ir.contains_key(*id)) {
        scan.skipped.push(SkippedPair { id: id.clone(), reason: "no infrared counterpart".into() });
    }
    scan.skipped.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(scan)
}

/// Writes `count` seeded synthetic pairs under `dir/ir` and `dir/vi`, named `pair_000`, ….
///
/// Infrared frames hold a few warm blobs on a cool gradient; visible frames hold a smooth colour
/// field with texture. Useful as a fixture when no real corpus is at hand.
pub fn write_synthetic_pairs(dir: impl AsRef<Path>, count: usize, height: usize, width: usize, seed: u64) -> Result<Vec<String>> {
    let dir = dir.as_ref();
    for sub in ["ir", "vi"] {
        std::fs::create_dir_all(dir.join(sub)).map_err(|e| Error::io(dir.join(sub), e))?;
    }
    let mut ids = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("pair_{i:03}");
        let mut rng = crate::seed::rng(crate::derive_seed(seed, &["fixture", &id]));
        let blobs: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.random_range(0.0..height as f64), rng.random_range(0.0..width as f64), rng.random_range(2.0..6.0)))
            .collect();
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let ir = Image::from_fn_gray(height, width, |y, x| {
            let base = 0.2 + 0.2 * y as f64 / height as f64;
            let heat: f64 = blobs
                .iter()
                .map(|(by, bx, r)| (-((y as f64 - by).powi(2) + (x as f64 - bx).powi(2)) / (2.0 * r * r)).exp())
                .sum();
            (base + 0.6 * heat).min(1.0)
        })?;
        let vi = Image::from_fn_rgb(height, width, |y, x| {
            let (fy, fx) = (y as f64 / height as f64, x as f64 / width as f64);
            let tex = 0.08 * ((x as f64 * 0.9 + phase).sin() * (y as f64 * 0.7).cos());
            [
                (0.3 + 0.4 * fx + tex).clamp(0.0, 1.0),
                (0.35 + 0.3 * fy + tex).clamp(0.0, 1.0),
                (0.5 + 0.2 * (fx - fy) + tex).clamp(0.0, 1.0),
            ]
        })?;
        save_png(&ir, dir.join("ir").join(format!("{id}.png")))?;
        save_png(&vi, dir.join("vi").join(format!("{id}.png")))?;
        ids.push(id);
    }
    Ok(ids)
}
