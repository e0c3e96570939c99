//! Image, field, mask and histogram types plus the classical operations
//! (histogram equalization, entropy, windowed means, 3x3 correlation) the
//! enhancement pipelines are built from.
//!
//! Every windowed operation uses replicate padding: out-of-bounds reads
//! return the nearest edge pixel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of gray levels in an 8-bit image.
pub const LEVELS: usize = 256;

/// Largest representable gray level.
pub const MAX_LEVEL: u8 = 255;

/// Rounds half-up, then saturates to `[0, 255]`. NaN maps to 0.
#[inline]
pub fn to_u8(v: f64) -> u8 {
    let r = (v + 0.5).floor();
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// `round_half_up(num / den)` in exact integer arithmetic.
#[inline]
fn ratio_round(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// An 8-bit grayscale image stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for Raster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyRaster { width, height });
        }
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Raster::new(width, height, vec![value; width * height])
    }

    /// Builds an image from `f(x, y)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Raster::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false: a `Raster` holds at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Pixel read with replicate padding.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        self.get(clamp_index(x, self.width), clamp_index(y, self.height))
    }

    pub fn min_max(&self) -> (u8, u8) {
        self.data
            .iter()
            .fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Exact mean intensity (integer sum, one division).
    pub fn mean(&self) -> f64 {
        let sum: u64 = self.data.iter().map(|&v| v as u64).sum();
        sum as f64 / self.data.len() as f64
    }

    pub fn is_constant(&self) -> bool {
        let (lo, hi) = self.min_max();
        lo == hi
    }

    /// Applies a 256-entry lookup table to every pixel.
    pub fn map_lut(&self, lut: &[u8; LEVELS]) -> Raster {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| lut[v as usize]).collect(),
        }
    }

    pub fn histogram(&self) -> Histogram {
        histogram(self)
    }

    pub(crate) fn check_same_dims(&self, other: &Raster) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }
}

/// A real-valued per-pixel field, row-major, same shape as its source image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyRaster { width, height });
        }
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(ScalarField {
            width,
            height,
            data,
        })
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        ScalarField {
            width,
            height,
            data,
        }
    }

    pub fn from_raster(img: &Raster) -> Self {
        ScalarField::from_parts(
            img.width,
            img.height,
            img.data.iter().map(|&v| v as f64).collect(),
        )
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        self.get(clamp_index(x, self.width), clamp_index(y, self.height))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_parts(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rounds half-up and saturates each value.
    pub fn to_raster(&self) -> Raster {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| to_u8(v)).collect(),
        }
    }

    /// Replicate-padded 3x3 correlation; `kernel[row][col]`, row 0 above.
    pub fn convolve3x3(&self, kernel: &[[f64; 3]; 3]) -> ScalarField {
        let (w, h) = (self.width, self.height);
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut acc = 0.0;
                for (ky, row) in kernel.iter().enumerate() {
                    for (kx, &k) in row.iter().enumerate() {
                        if k != 0.0 {
                            acc += k * self.get_clamped(x + kx as isize - 1, y + ky as isize - 1);
                        }
                    }
                }
                out.push(acc);
            }
        }
        ScalarField::from_parts(w, h, out)
    }
}

/// One boolean per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn empty(width: usize, height: usize) -> Self {
        PixelMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        PixelMask {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(PixelMask {
            width,
            height,
            bits,
        })
    }

    /// Mask of pixels whose value satisfies `pred`.
    pub fn from_values(img: &Raster, pred: impl Fn(u8) -> bool) -> Self {
        PixelMask {
            width: img.width,
            height: img.height,
            bits: img.data.iter().map(|&v| pred(v)).collect(),
        }
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.bits[y * self.width + x] = on;
    }

    #[inline]
    pub(crate) fn set_index(&mut self, i: usize, on: bool) {
        self.bits[i] = on;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// 256-bin gray-level histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bins: [u64; LEVELS],
    total: u64,
}

impl Histogram {
    pub fn from_bins(bins: [u64; LEVELS]) -> Result<Self> {
        let total = bins.iter().sum();
        if total == 0 {
            return Err(Error::EmptyHistogram);
        }
        Ok(Histogram { bins, total })
    }

    /// Histogram of the masked pixels only.
    pub fn from_masked(img: &Raster, mask: &PixelMask) -> Result<Self> {
        if img.dims() != mask.dims() {
            return Err(Error::DimensionMismatch {
                left: img.dims(),
                right: mask.dims(),
            });
        }
        let mut bins = [0u64; LEVELS];
        for (&v, _) in img.data.iter().zip(&mask.bits).filter(|(_, &m)| m) {
            bins[v as usize] += 1;
        }
        Histogram::from_bins(bins).map_err(|_| Error::EmptyMask)
    }

    #[inline]
    pub fn bins(&self) -> &[u64; LEVELS] {
        &self.bins
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn probability(&self, level: usize) -> f64 {
        self.bins[level] as f64 / self.total as f64
    }

    /// Cumulative counts, `cum[v] = #pixels <= v`.
    pub fn cumulative(&self) -> [u64; LEVELS] {
        let mut cum = [0u64; LEVELS];
        let mut acc = 0;
        for (c, &b) in cum.iter_mut().zip(&self.bins) {
            acc += b;
            *c = acc;
        }
        cum
    }

    /// Equalization table onto `[lo, hi]`: `lo + round((hi - lo) * CDF(v))`.
    pub fn equalization_lut(&self, lo: u8, hi: u8) -> [u8; LEVELS] {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64;
        let cum = self.cumulative();
        let mut lut = [0u8; LEVELS];
        for (l, &c) in lut.iter_mut().zip(&cum) {
            *l = lo + ratio_round(span * c, self.total) as u8;
        }
        lut
    }

    /// `-sum p log10 p`, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        let n = self.total as f64;
        self.bins
            .iter()
            .filter(|&&b| b > 0)
            .map(|&b| {
                let p = b as f64 / n;
                -p * p.log10()
            })
            .sum()
    }
}

pub fn histogram(img: &Raster) -> Histogram {
    let mut bins = [0u64; LEVELS];
    for &v in &img.data {
        bins[v as usize] += 1;
    }
    Histogram {
        bins,
        total: img.data.len() as u64,
    }
}

/// Classical histogram equalization onto the full gray range.
pub fn equalize(img: &Raster) -> Raster {
    img.map_lut(&histogram(img).equalization_lut(0, MAX_LEVEL))
}

/// Equalizes only the masked pixels using their own CDF; the rest pass through.
pub fn equalize_masked(img: &Raster, mask: &PixelMask) -> Result<Raster> {
    equalize_masked_into(img, mask, 0, MAX_LEVEL)
}

/// Like [`equalize_masked`] but maps the masked pixels onto `[lo, hi]`.
pub fn equalize_masked_into(img: &Raster, mask: &PixelMask, lo: u8, hi: u8) -> Result<Raster> {
    if lo > hi {
        return Err(Error::invalid("range", format!("lo {lo} > hi {hi}")));
    }
    let lut = Histogram::from_masked(img, mask)?.equalization_lut(lo, hi);
    let data = img
        .data
        .iter()
        .zip(&mask.bits)
        .map(|(&v, &m)| if m { lut[v as usize] } else { v })
        .collect();
    Ok(Raster {
        width: img.width,
        height: img.height,
        data,
    })
}

pub fn entropy(img: &Raster) -> f64 {
    histogram(img).entropy()
}

/// Mean over the replicate-padded `(2r+1)^2` neighborhood.
pub fn local_mean(img: &Raster, radius: usize) -> Result<ScalarField> {
    if radius == 0 {
        return Err(Error::invalid("radius", "must be at least 1"));
    }
    let r = radius as isize;
    let n = ((2 * radius + 1) * (2 * radius + 1)) as f64;
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut sum = 0u64;
            for dy in -r..=r {
                for dx in -r..=r {
                    sum += img.get_clamped(x + dx, y + dy) as u64;
                }
            }
            out.push(sum as f64 / n);
        }
    }
    Ok(ScalarField::from_parts(w, h, out))
}

/// Replicate-padded 3x3 correlation of an image; output is unclamped.
pub fn convolve3x3(img: &Raster, kernel: &[[f64; 3]; 3]) -> ScalarField {
    ScalarField::from_raster(img).convolve3x3(kernel)
}
