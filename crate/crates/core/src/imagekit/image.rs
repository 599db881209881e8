use crate::{Error, Result};

/// An `H × W × C` floating point raster, `C ∈ {1, 3}`, row-major with interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!(
                "images have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::invalid(format!(
                "data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    /// A constant image.
    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Result<Self> {
        Self::filled(height, width, channels, 0.0)
    }

    /// Builds a single channel image by evaluating `f(row, col)`.
    pub fn from_fn_gray(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(y, x));
            }
        }
        Self::new(height, width, 1, data)
    }

    /// Builds an RGB image by evaluating `f(row, col) -> [r, g, b]`.
    pub fn from_fn_rgb(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(y, x));
            }
        }
        Self::new(height, width, 3, data)
    }

    /// Stacks single channel planes into one image.
    pub fn from_planes(planes: &[Image]) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::invalid("no planes given"))?;
        if planes.len() != 1 && planes.len() != 3 {
            return Err(Error::invalid(format!(
                "expected 1 or 3 planes, got {}",
                planes.len()
            )));
        }
        for p in planes {
            if p.channels != 1 || !p.same_size(first) {
                return Err(Error::invalid("planes must be single channel and equally sized"));
            }
        }
        let n = first.pixel_count();
        let c = planes.len();
        let mut data = vec![0.0; n * c];
        for (ch, p) in planes.iter().enumerate() {
            for (i, v) in p.data.iter().enumerate() {
                data[i * c + ch] = *v;
            }
        }
        Self::new(first.height, first.width, c, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn is_gray(&self) -> bool {
        self.channels == 1
    }

    pub fn is_rgb(&self) -> bool {
        self.channels == 3
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + channel]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, channel: usize, value: f64) {
        self.data[(row * self.width + col) * self.channels + channel] = value;
    }

    /// Replicate-edge access with signed coordinates.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize, channel: usize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c, channel)
    }

    pub fn same_size(&self, other: &Image) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.same_size(other) && self.channels == other.channels
    }

    pub(crate) fn ensure_same_size(&self, other: &Image, what: &str) -> Result<()> {
        if self.same_size(other) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what}: dimension mismatch {}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )))
        }
    }

    pub(crate) fn ensure_gray(&self, what: &str) -> Result<()> {
        if self.is_gray() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what} expects a single channel image, got {} channels",
                self.channels
            )))
        }
    }

    pub(crate) fn ensure_rgb(&self, what: &str) -> Result<()> {
        if self.is_rgb() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what} expects an RGB image, got {} channel(s)",
                self.channels
            )))
        }
    }

    /// Extracts one channel as a gray image.
    pub fn channel(&self, channel: usize) -> Image {
        assert!(channel < self.channels, "channel index out of range");
        let data = self
            .data
            .iter()
            .skip(channel)
            .step_by(self.channels)
            .copied()
            .collect();
        Image {
            height: self.height,
            width: self.width,
            channels: 1,
            data,
        }
    }

    /// Splits into single channel planes.
    pub fn planes(&self) -> Vec<Image> {
        (0..self.channels).map(|c| self.channel(c)).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// Combines two equally shaped images elementwise.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Result<Image> {
        if !self.same_shape(other) {
            return Err(Error::invalid("zip_map: shape mismatch"));
        }
        Ok(Image {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn clamped(&self) -> Image {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn clamp_in_place(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gray → RGB by replication; RGB is returned unchanged.
    pub fn to_rgb(&self) -> Image {
        if self.is_rgb() {
            return self.clone();
        }
        let data = self.data.iter().flat_map(|&v| [v, v, v]).collect();
        Image {
            height: self.height,
            width: self.width,
            channels: 3,
            data,
        }
    }

    /// Luminance for RGB (BT.601 `Y`), identity for gray.
    pub fn to_gray(&self) -> Image {
        if self.is_gray() {
            self.clone()
        } else {
            super::luminance(self)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
