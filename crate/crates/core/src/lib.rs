//! Degradation synthesis and evaluation toolkit for infrared/visible image fusion.
//!
//! The crate is organised bottom-up:
//!
//! - [`imagekit`]: float raster type, colour conversion, convolution, Sobel, 2-D DFT, seeded noise, PNG I/O
//! - [`degrade`]: the physical degradation operators (sensor, illumination, weather) and their composition
//! - [`prompts`]: the degradation prompt grammar, template bank, render and parse
//! - [`signatures`]: deterministic spectral/spatial degradation signatures and the embedding alignment loss
//! - [`fusion_math`]: query-swapped cross-attention and prompt modulation kernels
//! - [`losses`]: fusion training losses and the EN / SD / Qabf evaluation metrics
//! - [`dataset`]: seeded dataset synthesis, manifests and verification
//!
//! All pixel values live on a `[0, 1]` scale. Parameters that are conventionally quoted on the
//! 8-bit scale (noise standard deviations) are divided by [`imagekit::INTENSITY_SCALE`] where they
//! enter the numerics.

pub mod dataset;
pub mod degrade;
mod error;
pub mod fusion_math;
pub mod imagekit;
pub mod losses;
pub mod prompts;
mod seed;
pub mod signatures;

pub use error::{Error, Result};
pub use imagekit::Image;
pub use seed::derive_seed;
