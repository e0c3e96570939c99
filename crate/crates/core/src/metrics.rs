//! PSNR, absolute mean brightness error and contrast improvement index.

use crate::error::{Error, Result};
use crate::raster::Raster;

/// Mean squared error between two equally sized images.
pub fn mse(a: &Raster, b: &Raster) -> Result<f64> {
    a.check_same_dims(b)?;
    let sum: u64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum();
    Ok(sum as f64 / a.len() as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical images.
pub fn psnr(orig: &Raster, out: &Raster) -> Result<f64> {
    let e = mse(orig, out)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0f64 * 255.0 / e).log10())
}

/// `|mean(orig) - mean(out)|`, from exact integer sums.
pub fn ambe(orig: &Raster, out: &Raster) -> Result<f64> {
    orig.check_same_dims(out)?;
    let sa: i128 = orig.data().iter().map(|&v| v as i128).sum();
    let sb: i128 = out.data().iter().map(|&v| v as i128).sum();
    Ok((sa - sb).unsigned_abs() as f64 / orig.len() as f64)
}

/// Mean of `(max - min) / (max + min)` over 3x3 windows placed every
/// `stride` pixels; windows with `max + min == 0` are skipped. Returns 0 if
/// no window counts.
pub fn mean_window_contrast(img: &Raster, stride: usize) -> Result<f64> {
    let (w, h) = img.dims();
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }
    if stride == 0 {
        return Err(Error::invalid("cii.stride", "must be at least 1"));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in (0..=h - 3).step_by(stride) {
        for x in (0..=w - 3).step_by(stride) {
            let (mut lo, mut hi) = (u8::MAX, 0u8);
            for dy in 0..3 {
                for &v in &img.data()[(y + dy) * w + x..(y + dy) * w + x + 3] {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            let s = hi as u32 + lo as u32;
            if s > 0 {
                sum += (hi - lo) as f64 / s as f64;
                count += 1;
            }
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// Contrast improvement index with fully overlapping windows.
pub fn cii(orig: &Raster, out: &Raster) -> Result<f64> {
    cii_with_stride(orig, out, 1)
}

pub fn cii_with_stride(orig: &Raster, out: &Raster, stride: usize) -> Result<f64> {
    orig.check_same_dims(out)?;
    let base = mean_window_contrast(orig, stride)?;
    if base == 0.0 {
        return Err(Error::ZeroContrastOriginal);
    }
    Ok(mean_window_contrast(out, stride)? / base)
}

/// All three measures for one (original, enhanced) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub psnr: f64,
    pub ambe: f64,
    /// `None` when the original has zero contrast.
    pub cii: Option<f64>,
}

pub fn measure(orig: &Raster, out: &Raster) -> Result<Measures> {
    Ok(Measures {
        psnr: psnr(orig, out)?,
        ambe: ambe(orig, out)?,
        cii: match cii(orig, out) {
            Ok(v) => Some(v),
            Err(Error::ZeroContrastOriginal) | Err(Error::ImageTooSmall { .. }) => None,
            Err(e) => return Err(e),
        },
    })
}
