//! Physics-driven degradation model.
//!
//! Each modality passes through up to three operator families in a fixed nesting:
//! illumination, then weather, then sensor. The concrete operators are
//!
//! - contrast loss and column stripe noise for infrared: `α·I + 1_H nᵀ`
//! - motion blur and additive Gaussian noise: `I ∗ K(N, θ) + N(0, σ²)`
//! - Retinex-style illumination distortion: `(I / L) · L^γ`
//! - atmospheric scattering with rain: `I·t + A(1 − t) + R`, `t = exp(−β·d)`
//!
//! Severity levels `1..=10` map onto physical parameters through [`severity_to_params`].

mod compose;
mod kernel;
mod kind;
mod ops;
mod params;
mod rain;

pub use compose::{check_composable, compose};
pub use kernel::{make_blur_kernel, BlurKernel};
pub use kind::{DegradationKind, Family, Modality};
pub use ops::{
    apply_contrast_stripe, apply_illumination, apply_noise_blur, apply_weather,
    atmospheric_scatter, estimate_illumination, fallback_depth, transmission_map, ContrastStripe,
    Degradation, Illumination, NoiseBlur, Weather, ILLUMINATION_FLOOR,
};
pub use params::{
    ranges, severity_to_params, severity_to_params_jittered, DegradationSpec, Level,
    ResolvedParams, SideMaps,
};
pub use rain::rain_layer;
