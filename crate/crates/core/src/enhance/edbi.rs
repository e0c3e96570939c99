//! Enhancement for dark, blurred images: an unsharp boost followed by a
//! sigmoid-gain remap of the pixels below a threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Raster, ScalarField};

const BLUR: [[f64; 3]; 3] = [
    [1.0 / 16.0, 2.0 / 16.0, 1.0 / 16.0],
    [2.0 / 16.0, 4.0 / 16.0, 2.0 / 16.0],
    [1.0 / 16.0, 2.0 / 16.0, 1.0 / 16.0],
];

/// Recommended range for the unsharp scaling constant.
pub const UNSHARP_K_RANGE: std::ops::RangeInclusive<f64> = 0.2..=0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdbiParams {
    /// Unsharp scaling constant.
    pub k: f64,
    /// Contrast factor.
    pub c: f64,
    /// Remap threshold; `None` uses the mean of the input image.
    pub t: Option<f64>,
}

impl Default for EdbiParams {
    fn default() -> Self {
        EdbiParams {
            k: 0.5,
            c: 0.5,
            t: None,
        }
    }
}

impl EdbiParams {
    pub fn validate(&self) -> Result<()> {
        if !self.k.is_finite() {
            return Err(Error::invalid("edbi.k", "must be finite"));
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return Err(Error::invalid("edbi.c", "must be non-negative"));
        }
        if let Some(t) = self.t {
            if !(0.0..=255.0).contains(&t) {
                return Err(Error::invalid("edbi.t", format!("{t} outside [0, 255]")));
            }
        }
        Ok(())
    }

    /// Non-fatal issues worth reporting to the user.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !UNSHARP_K_RANGE.contains(&self.k) {
            w.push(format!(
                "edbi.k = {} is outside the usual range [0.2, 0.7]",
                self.k
            ));
        }
        w
    }
}

/// `g = (I0 - blur(I0)) + k I0`.
pub fn unsharp_boost(img: &Raster, k: f64) -> ScalarField {
    let orig = ScalarField::from_raster(img);
    let blurred = orig.convolve3x3(&BLUR);
    let data = orig
        .data()
        .iter()
        .zip(blurred.data())
        .map(|(&i0, &ib)| (i0 - ib) + k * i0)
        .collect();
    ScalarField::from_parts(img.width(), img.height(), data)
}

/// Pointwise remap of a single (already clamped) intensity.
#[inline]
pub fn contrast_level(i: f64, c: f64, t: f64) -> f64 {
    if i < t {
        i + i * (c / (1.0 + (-i).exp()))
    } else {
        i
    }
}

/// Leaves values above `t` alone and boosts those below by
/// `i c / (1 + e^-i)`. The field is clamped to `[0, 255]` first.
pub fn contrast_map(field: &ScalarField, c: f64, t: f64) -> Result<Raster> {
    if !(c >= 0.0) {
        return Err(Error::invalid("edbi.c", "must be non-negative"));
    }
    Ok(field
        .map(|v| contrast_level(v.clamp(0.0, 255.0), c, t))
        .to_raster())
}

pub fn edbi(img: &Raster, p: &EdbiParams) -> Result<Raster> {
    p.validate()?;
    let t = p.t.unwrap_or_else(|| img.mean());
    contrast_map(&unsharp_boost(img, p.k), p.c, t)
}
