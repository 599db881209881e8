//! Numeric substrate: the float raster type and the primitive operations everything else
//! builds on.
//!
//! Conventions shared by the whole crate:
//!
//! - pixel values are `f64` on a `[0, 1]` scale, stored row-major and channel-interleaved
//! - every spatial filter uses replicate-edge padding
//! - the forward DFT is unnormalised; the inverse carries the `1/(H·W)` factor

mod color;
pub(crate) mod filter;
mod fourier;
mod image;
pub mod io;
mod noise;

pub use color::{luminance, rgb_to_ycbcr, ycbcr_to_rgb};
pub use filter::{box_blur, convolve2d, sobel, sobel_components, Kernel};
pub use fourier::{dft2, Spectrum};
pub use image::Image;
pub use noise::{gaussian_field, gaussian_field_scaled, gaussian_noise_like, INTENSITY_SCALE};
