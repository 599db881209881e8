//! Fusion training losses and evaluation metrics.
//!
//! Losses take the fused image and the two clean sources. By default every image is reduced to
//! BT.601 luminance before comparison. [`ChannelDomain::BroadcastIr`] instead works in the fused
//! image's channels, replicating the gray infrared source across RGB.

mod metrics;
mod ssim;

use serde::{Deserialize, Serialize};

use crate::imagekit::{rgb_to_ycbcr, sobel};
use crate::{Error, Image, Result};

pub use metrics::{entropy_metric, qabf_metric, qabf_with, sd_metric, QabfConstants};
pub use ssim::{ssim, ssim_loss, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelDomain {
    #[default]
    Luminance,
    BroadcastIr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossWeights {
    pub alpha_int: f64,
    pub alpha_ssim: f64,
    pub alpha_grad: f64,
    pub alpha_color: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { alpha_int: 8.0, alpha_ssim: 1.0, alpha_grad: 10.0, alpha_color: 12.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha_int, self.alpha_ssim, self.alpha_grad, self.alpha_color];
        if all.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(Error::invalid(format!("loss weights must be finite and nonnegative: {all:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub l_int: f64,
    pub l_ssim: f64,
    pub l_grad: f64,
    pub l_color: f64,
    pub total: f64,
}

impl LossReport {
    pub fn from_components(l_int: f64, l_ssim: f64, l_grad: f64, l_color: f64, w: &LossWeights) -> Self {
        let total = w.alpha_int * l_int + w.alpha_ssim * l_ssim + w.alpha_grad * l_grad + w.alpha_color * l_color;
        Self { l_int, l_ssim, l_grad, l_color, total }
    }
}

fn to_channels(img: &Image, channels: usize) -> Image {
    match (img.channels(), channels) {
        (1, 3) => img.to_rgb(),
        (3, 1) => img.to_gray(),
        _ => img.clone(),
    }
}

fn align(fused: &Image, ir: &Image, vi: &Image, domain: ChannelDomain, what: &str) -> Result<[Image; 3]> {
    fused.ensure_same_size(ir, what)?;
    fused.ensure_same_size(vi, what)?;
    let channels = match domain {
        ChannelDomain::Luminance => 1,
        ChannelDomain::BroadcastIr => fused.channels(),
    };
    Ok([fused, ir, vi].map(|img| to_channels(img, channels)))
}

fn per_channel(img: &Image, f: impl Fn(&Image) -> Result<Image>) -> Result<Image> {
    if img.is_gray() {
        return f(img);
    }
    let planes = img.planes().iter().map(f).collect::<Result<Vec<_>>>()?;
    Image::from_planes(&planes)
}

fn max_residual_l1(f: &Image, a: &Image, b: &Image) -> f64 {
    let sum: f64 = f
        .data()
        .iter()
        .zip(a.data().iter().zip(b.data()))
        .map(|(f, (a, b))| (f - a.max(*b)).abs())
        .sum();
    sum / f.pixel_count() as f64
}

/// `(1/HW)·‖I_f − max(I_ir, I_vi)‖₁` in luminance.
pub fn intensity_loss(fused: &Image, ir: &Image, vi: &Image) -> Result<f64> {
    intensity_loss_in(fused, ir, vi, ChannelDomain::Luminance)
}

pub fn intensity_loss_in(fused: &Image, ir: &Image, vi: &Image, domain: ChannelDomain) -> Result<f64> {
    let [f, a, b] = align(fused, ir, vi, domain, "intensity_loss")?;
    Ok(max_residual_l1(&f, &a, &b))
}

/// `(1/HW)·‖∇I_f − max(∇I_ir, ∇I_vi)‖₁` with `∇` the Sobel magnitude, in luminance.
pub fn gradient_loss(fused: &Image, ir: &Image, vi: &Image) -> Result<f64> {
    gradient_loss_in(fused, ir, vi, ChannelDomain::Luminance)
}

pub fn gradient_loss_in(fused: &Image, ir: &Image, vi: &Image, domain: ChannelDomain) -> Result<f64> {
    let [f, a, b] = align(fused, ir, vi, domain, "gradient_loss")?;
    let [gf, ga, gb] = [&f, &a, &b].map(|img| per_channel(img, sobel));
    Ok(max_residual_l1(&gf?, &ga?, &gb?))
}

/// `(1/HW)·(‖Cb_f − Cb_vi‖₁ + ‖Cr_f − Cr_vi‖₁)`.
pub fn color_loss(fused: &Image, vi: &Image) -> Result<f64> {
    fused.ensure_rgb("color_loss")?;
    vi.ensure_rgb("color_loss")?;
    fused.ensure_same_size(vi, "color_loss")?;
    let (f, v) = (rgb_to_ycbcr(fused)?, rgb_to_ycbcr(vi)?);
    let sum: f64 = f
        .data()
        .chunks_exact(3)
        .zip(v.data().chunks_exact(3))
        .map(|(p, q)| (p[1] - q[1]).abs() + (p[2] - q[2]).abs())
        .sum();
    Ok(sum / fused.pixel_count() as f64)
}

/// All four losses and their weighted sum. The colour term is 0 unless both the fused and
/// visible images are RGB.
pub fn total_loss(fused: &Image, ir: &Image, vi: &Image, w: &LossWeights) -> Result<LossReport> {
    w.validate()?;
    let l_color = if fused.is_rgb() && vi.is_rgb() { color_loss(fused, vi)? } else { 0.0 };
    Ok(LossReport::from_components(
        intensity_loss(fused, ir, vi)?,
        ssim_loss(fused, ir, vi)?,
        gradient_loss(fused, ir, vi)?,
        l_color,
        w,
    ))
}

/// Metrics and losses for one fused triple, as emitted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionEvaluation {
    pub en: f64,
    pub sd: f64,
    pub qabf: f64,
    /// Mean of `SSIM(fused, ir)` and `SSIM(fused, vi)`.
    pub ssim: f64,
    pub l_int: f64,
    pub l_grad: f64,
    pub l_color: f64,
    pub total: f64,
}

impl FusionEvaluation {
    pub const CSV_HEADER: &'static str = "en,sd,qabf,ssim,l_int,l_grad,l_color,total";

    pub fn to_csv_row(&self) -> String {
        [self.en, self.sd, self.qabf, self.ssim, self.l_int, self.l_grad, self.l_color, self.total]
            .map(|v| v.to_string())
            .join(",")
    }
}

pub fn evaluate(fused: &Image, ir: &Image, vi: &Image, w: &LossWeights) -> Result<FusionEvaluation> {
    let report = total_loss(fused, ir, vi, w)?;
    Ok(FusionEvaluation {
        en: entropy_metric(fused),
        sd: sd_metric(fused),
        qabf: qabf_metric(fused, ir, vi)?,
        ssim: 1.0 - report.l_ssim / 2.0,
        l_int: report.l_int,
        l_grad: report.l_grad,
        l_color: report.l_color,
        total: report.total,
    })
}
