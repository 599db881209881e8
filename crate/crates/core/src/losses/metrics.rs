//! No-reference fusion metrics: entropy, standard deviation and Qabf.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::imagekit::io::quantize;
use crate::imagekit::{sobel_components, INTENSITY_SCALE};
use crate::{Image, Result};

/// Shannon entropy in bits of the 256-bin histogram of the quantised luminance.
pub fn entropy_metric(img: &Image) -> f64 {
    let y = img.to_gray();
    let mut hist = [0usize; 256];
    for &v in y.data() {
        hist[usize::from(quantize(v))] += 1;
    }
    let n = y.pixel_count() as f64;
    let h: f64 = hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Population standard deviation of the luminance on the 0–255 scale.
pub fn sd_metric(img: &Image) -> f64 {
    let y = img.to_gray();
    let n = y.pixel_count() as f64;
    // Shifted by the first sample so a constant image gives exactly zero.
    let shift = y.data()[0];
    let (s1, s2) = y.data().iter().fold((0.0, 0.0), |(a, b), v| (a + (v - shift), b + (v - shift).powi(2)));
    let var = ((s2 - s1 * s1 / n) / n).max(0.0);
    var.sqrt() * INTENSITY_SCALE
}

/// Sigmoid parameters of the edge-preservation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QabfConstants {
    pub kappa_g: f64,
    pub sigma_g: f64,
    pub kappa_a: f64,
    pub sigma_a: f64,
}

impl Default for QabfConstants {
    fn default() -> Self {
        Self { kappa_g: -10.0, sigma_g: 0.5, kappa_a: -20.0, sigma_a: 0.75 }
    }
}

// Sigmoid with its gain chosen so that a perfect preservation value of 1 maps to exactly 1.
fn preservation(value: f64, kappa: f64, sigma: f64) -> f64 {
    let gain = 1.0 + (kappa * (1.0 - sigma)).exp();
    gain / (1.0 + (kappa * (value - sigma)).exp())
}

struct Edges {
    strength: Vec<f64>,
    orientation: Vec<f64>,
}

fn edges(img: &Image) -> Result<Edges> {
    let (gx, gy) = sobel_components(&img.to_gray())?;
    let strength = gx.data().iter().zip(gy.data()).map(|(a, b)| a.hypot(*b)).collect();
    let orientation = gx.data().iter().zip(gy.data()).map(|(a, b)| b.atan2(*a)).collect();
    Ok(Edges { strength, orientation })
}

// Per-pixel edge preservation of `source` in `fused`.
fn transfer(source: &Edges, fused: &Edges, i: usize, c: &QabfConstants) -> f64 {
    let (ga, gf) = (source.strength[i], fused.strength[i]);
    let g = if ga == 0.0 || gf == 0.0 {
        0.0
    } else if ga > gf {
        gf / ga
    } else {
        ga / gf
    };
    // Edge orientation is undirected: compare modulo π.
    let d = (source.orientation[i] - fused.orientation[i]).abs() % PI;
    let d = d.min(PI - d);
    let a = 1.0 - d / FRAC_PI_2;
    preservation(g, c.kappa_g, c.sigma_g) * preservation(a, c.kappa_a, c.sigma_a)
}

/// Edge-information transfer from both sources into the fused image, in `[0, 1]`.
pub fn qabf_metric(fused: &Image, ir: &Image, vi: &Image) -> Result<f64> {
    qabf_with(fused, ir, vi, &QabfConstants::default())
}

pub fn qabf_with(fused: &Image, ir: &Image, vi: &Image, c: &QabfConstants) -> Result<f64> {
    fused.ensure_same_size(ir, "qabf")?;
    fused.ensure_same_size(vi, "qabf")?;
    let (ef, ea, eb) = (edges(fused)?, edges(ir)?, edges(vi)?);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..ef.strength.len() {
        let (wa, wb) = (ea.strength[i], eb.strength[i]);
        num += transfer(&ea, &ef, i, c) * wa + transfer(&eb, &ef, i, c) * wb;
        den += wa + wb;
    }
    Ok(if den == 0.0 { 0.0 } else { (num / den).clamp(0.0, 1.0) })
}
