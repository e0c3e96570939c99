//! Adaptive local region stretching: the gray range is cut into dark, mid
//! and bright bands, the pixels of each band are equalized on their own
//! (masked HE onto the full gray range), and the result is blended back with
//! the input using a weight that shrinks as the band's pseudo-variance grows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{equalize_masked, histogram, Histogram, PixelMask, Raster};

/// Inclusive gray-level bands.
pub const BANDS: [(u8, u8); 3] = [(0, 85), (86, 170), (171, 255)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlrsParams {
    /// Weight ceiling in `[0, 1]`; 0 disables enhancement.
    pub enhancement_level: f64,
}

impl Default for AlrsParams {
    fn default() -> Self {
        AlrsParams {
            enhancement_level: 1.0,
        }
    }
}

impl AlrsParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.enhancement_level) {
            return Err(Error::invalid(
                "alrs.level",
                format!("{} outside [0, 1]", self.enhancement_level),
            ));
        }
        Ok(())
    }
}

/// Mean absolute deviation from the mean over the levels `[lo, hi]`:
/// `(1/N) sum_j n_j |y_j - m|`. `None` if the band is empty.
pub fn pseudo_variance(hist: &Histogram, lo: u8, hi: u8) -> Option<f64> {
    let range = lo as usize..=hi as usize;
    let bins = &hist.bins()[range.clone()];
    let n: u64 = bins.iter().sum();
    if n == 0 {
        return None;
    }
    let sum: u64 = range.clone().zip(bins).map(|(l, &c)| l as u64 * c).sum();
    let mean = sum as f64 / n as f64;
    let dev: f64 = range
        .zip(bins)
        .map(|(l, &c)| c as f64 * (l as f64 - mean).abs())
        .sum();
    Some(dev / n as f64)
}

/// Blend weight for a band of the given pseudo-variance.
pub fn band_weight(level: f64, sigma: f64, lo: u8, hi: u8) -> f64 {
    let half_width = (hi as f64 - lo as f64 + 1.0) / 2.0;
    level * (1.0 - (sigma / half_width).min(1.0))
}

pub fn alrs(img: &Raster, p: &AlrsParams) -> Result<Raster> {
    p.validate()?;
    let hist = histogram(img);
    let mut out: Vec<f64> = img.data().iter().map(|&v| v as f64).collect();
    for &(lo, hi) in &BANDS {
        let Some(sigma) = pseudo_variance(&hist, lo, hi) else {
            continue;
        };
        let w = band_weight(p.enhancement_level, sigma, lo, hi);
        if w == 0.0 {
            continue;
        }
        let mask = PixelMask::from_values(img, |v| (lo..=hi).contains(&v));
        let eq = equalize_masked(img, &mask)?;
        for ((o, &on), &e) in out.iter_mut().zip(mask.bits()).zip(eq.data()) {
            if on {
                *o = w * e as f64 + (1.0 - w) * *o;
            }
        }
    }
    Ok(crate::raster::ScalarField::new(img.width(), img.height(), out)?.to_raster())
}
