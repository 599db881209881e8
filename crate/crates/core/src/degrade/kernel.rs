use std::ops::Deref;

use super::params::ranges;
use crate::imagekit::Kernel;
use crate::{Error, Result};

/// A normalised linear motion-blur kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel {
    kernel: Kernel,
    length: usize,
    angle: f64,
}

impl BlurKernel {
    /// The 1×1 unit kernel (no blur).
    pub fn identity() -> Self {
        Self {
            kernel: Kernel::identity(),
            length: 1,
            angle: 0.0,
        }
    }

    /// Segment length `N` in pixels.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Angle in degrees from the +x axis, measured toward +row.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Side of the square support (`N` rounded up to odd).
    pub fn size(&self) -> usize {
        self.kernel.width()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }
}

impl Deref for BlurKernel {
    type Target = Kernel;

    fn deref(&self) -> &Kernel {
        &self.kernel
    }
}

/// Rotates `length` unit impulses spaced one pixel apart (centred on the kernel centre) by
/// `angle_deg`, splats each bilinearly, and normalises to unit sum.
///
/// Only the half with non-negative offset is splatted; the other half is its point reflection,
/// added after the fact so the result is exactly symmetric under 180° rotation.
pub(crate) fn line_kernel(length: usize, angle_deg: f64) -> Kernel {
    assert!(length >= 1);
    let size = if length % 2 == 1 { length } else { length + 1 };
    let centre = ((size - 1) / 2) as f64;
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let mut half = vec![0.0; size * size];

    let mut splat = |row: f64, col: f64, weight: f64| {
        let (r0, c0) = (row.floor(), col.floor());
        let (fr, fc) = (row - r0, col - c0);
        let taps = [
            (0, 0, (1.0 - fr) * (1.0 - fc)),
            (0, 1, (1.0 - fr) * fc),
            (1, 0, fr * (1.0 - fc)),
            (1, 1, fr * fc),
        ];
        for (dr, dc, w) in taps {
            if w == 0.0 {
                continue;
            }
            let r = r0 as usize + dr;
            let c = c0 as usize + dc;
            half[r * size + c] += weight * w;
        }
    };

    for k in 0..length {
        let offset = k as f64 - (length as f64 - 1.0) / 2.0;
        if offset > 0.0 {
            splat(centre + offset * sin, centre + offset * cos, 1.0);
        } else if offset == 0.0 {
            // Self-reflected centre impulse: half weight on each side of the symmetrisation.
            splat(centre, centre, 0.5);
        }
    }

    let n = size * size;
    let symmetric: Vec<f64> = (0..n).map(|i| half[i] + half[n - 1 - i]).collect();
    let total: f64 = symmetric.iter().sum();
    let weights = symmetric.into_iter().map(|w| w / total).collect();
    Kernel::new(size, size, weights).expect("odd square kernel")
}

/// Motion-blur kernel for segment length `n ∈ [3, 12]` and angle `theta ∈ [10°, 80°]`.
///
/// The support is `n × n` for odd `n` and `(n+1) × (n+1)` for even `n`, keeping a centre pixel.
pub fn make_blur_kernel(n: usize, theta: f64) -> Result<BlurKernel> {
    let (lo, hi) = ranges::KERNEL_LENGTH;
    if !(lo..=hi).contains(&n) {
        return Err(Error::invalid(format!("blur length {n} outside [{lo}, {hi}]")));
    }
    let (alo, ahi) = ranges::KERNEL_ANGLE;
    if !(theta.is_finite() && (alo..=ahi).contains(&theta)) {
        return Err(Error::invalid(format!("blur angle {theta} outside [{alo}, {ahi}]")));
    }
    Ok(BlurKernel {
        kernel: line_kernel(n, theta),
        length: n,
        angle: theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent(d: f64) -> f64 {
        (1.0 - d.abs()).max(0.0)
    }

    /// Gather-form rasteriser: each cell sums the bilinear tent of every rotated impulse.
    fn gather_oracle(n: usize, theta: f64) -> Vec<f64> {
        let size = if n % 2 == 1 { n } else { n + 1 };
        let c = ((size - 1) / 2) as f64;
        let t = theta.to_radians();
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let o = k as f64 - (n as f64 - 1.0) / 2.0;
                (c + o * t.sin(), c + o * t.cos())
            })
            .collect();
        let mut w = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                w[i * size + j] = pts
                    .iter()
                    .map(|(r, cc)| tent(*r - i as f64) * tent(*cc - j as f64))
                    .sum();
            }
        }
        let s: f64 = w.iter().sum();
        w.iter().map(|v| v / s).collect()
    }

    #[test]
    fn matches_gather_oracle() {
        for n in 3..=12 {
            for theta in [10.0, 33.0, 45.0, 71.5, 80.0] {
                let k = make_blur_kernel(n, theta).unwrap();
                let oracle = gather_oracle(n, theta);
                for (a, b) in k.weights().iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-12, "n={n} theta={theta}");
                }
            }
        }
    }

    #[test]
    fn three_tap_diagonal() {
        let k = make_blur_kernel(3, 45.0).unwrap();
        let diag: f64 = (0..3).map(|i| k.at(i, i)).sum();
        let anti = k.at(0, 2) + k.at(2, 0);
        assert!(diag > 0.7, "diagonal mass {diag}");
        assert_eq!(anti, 0.0);
        // Frozen from the gather oracle: centre = (1 + 2·(1 − √½)²)/3.
        let h = 1.0 - 0.5f64.sqrt();
        assert!((k.at(1, 1) - (1.0 + 2.0 * h * h) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalised_and_point_symmetric() {
        for n in 3..=12 {
            for theta in [10.0, 25.0, 45.0, 60.0, 80.0] {
                let k = make_blur_kernel(n, theta).unwrap();
                assert!((k.sum() - 1.0).abs() < 1e-9);
                let w = k.weights();
                assert!(w.iter().all(|&v| v >= 0.0));
                let len = w.len();
                for i in 0..len {
                    assert_eq!(w[i], w[len - 1 - i]);
                }
            }
        }
    }

    #[test]
    fn even_length_gets_odd_support() {
        let k = make_blur_kernel(4, 30.0).unwrap();
        assert_eq!(k.size(), 5);
        assert_eq!(k.length(), 4);
    }

    #[test]
    fn range_checks() {
        assert!(make_blur_kernel(2, 45.0).is_err());
        assert!(make_blur_kernel(13, 45.0).is_err());
        assert!(make_blur_kernel(5, 5.0).is_err());
        assert!(make_blur_kernel(5, 85.0).is_err());
    }
}
