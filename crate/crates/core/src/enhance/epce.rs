//! Edge-preserving contrast enhancement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{local_mean, Raster, ScalarField};

const HIGH_PASS: [[f64; 3]; 3] = [[0.0, -1.0, 0.0], [-1.0, 5.0, -1.0], [0.0, -1.0, 0.0]];
const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpceParams {
    /// Output gain.
    pub gain: f64,
    /// Exponent on the high-pass image.
    pub alpha: f64,
    /// Exponent on the edge image.
    pub gamma: f64,
    /// Enhancement parameter, `0 <= c < 256`.
    pub c: f64,
    /// Range maximum.
    pub m: f64,
}

impl Default for EpceParams {
    fn default() -> Self {
        EpceParams {
            gain: 40.0,
            alpha: 1.0,
            gamma: 1.0,
            c: 240.0,
            m: 255.0,
        }
    }
}

impl EpceParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..256.0).contains(&self.c) {
            return Err(Error::invalid(
                "epce.c",
                format!("{} outside [0, 256)", self.c),
            ));
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::invalid("epce.m", "must be positive"));
        }
        if !(self.gain > 0.0) || !self.gain.is_finite() {
            return Err(Error::invalid("epce.gain", "must be positive"));
        }
        if !self.alpha.is_finite() || !self.gamma.is_finite() {
            return Err(Error::invalid("epce.alpha", "exponents must be finite"));
        }
        Ok(())
    }
}

/// Sigmoid transfer `I = 2 / (1 + exp(2 tau / lambda)) - 1` with
/// `lambda = C + (M - C) mu / M`, `mu` the 3x3 local mean.
pub fn epce_transfer(img: &Raster, c: f64, m: f64) -> Result<ScalarField> {
    if !(m > 0.0) {
        return Err(Error::invalid("epce.m", "must be positive"));
    }
    let mu = local_mean(img, 1)?;
    let data = img
        .data()
        .iter()
        .zip(mu.data())
        .map(|(&tau, &mu)| {
            let lambda = c + (m - c) * (mu / m);
            let tau = tau as f64;
            if tau == 0.0 {
                0.0
            } else if lambda <= 0.0 {
                // Limit of the sigmoid as lambda -> 0+.
                -1.0
            } else {
                2.0 / (1.0 + (2.0 * tau / lambda).exp()) - 1.0
            }
        })
        .collect();
    ScalarField::new(img.width(), img.height(), data)
}

/// Sobel magnitude scaled so its maximum is 1 (all zero on flat input).
pub fn edge_image(field: &ScalarField) -> ScalarField {
    let gx = field.convolve3x3(&SOBEL_X);
    let gy = field.convolve3x3(&SOBEL_Y);
    let mag = ScalarField::from_parts(
        field.width(),
        field.height(),
        gx.data()
            .iter()
            .zip(gy.data())
            .map(|(a, b)| a.hypot(*b))
            .collect(),
    );
    let peak = mag.max();
    if peak > 0.0 {
        mag.map(|v| v / peak)
    } else {
        mag
    }
}

pub fn high_pass(field: &ScalarField) -> ScalarField {
    field.convolve3x3(&HIGH_PASS)
}

#[inline]
fn signed_pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// `A (I + I_ED^gamma * I_EN^alpha)`, rounded and saturated.
pub fn epce(img: &Raster, p: &EpceParams) -> Result<Raster> {
    p.validate()?;
    let transfer = epce_transfer(img, p.c, p.m)?;
    let detail = high_pass(&transfer);
    let edges = edge_image(&transfer);
    let out: Vec<f64> = transfer
        .data()
        .iter()
        .zip(detail.data())
        .zip(edges.data())
        .map(|((&i, &en), &ed)| p.gain * (i + signed_pow(ed, p.gamma) * signed_pow(en, p.alpha)))
        .collect();
    Ok(ScalarField::new(img.width(), img.height(), out)?.to_raster())
}
