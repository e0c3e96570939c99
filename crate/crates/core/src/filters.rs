//! Speckle (Frost) and impulse (median) noise filters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{to_u8, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrostParams {
    /// Odd kernel side, at least 3.
    pub size: usize,
    /// Multiplier on the exponent coefficient.
    pub damping_scale: f64,
}

impl Default for FrostParams {
    fn default() -> Self {
        FrostParams {
            size: 3,
            damping_scale: 1.0,
        }
    }
}

fn check_odd(name: &'static str, n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::invalid(
            name,
            format!("{n} must be odd and at least 3"),
        ));
    }
    Ok(())
}

impl FrostParams {
    pub fn validate(&self) -> Result<()> {
        check_odd("frost.n", self.size)?;
        if !(self.damping_scale >= 0.0) || !self.damping_scale.is_finite() {
            return Err(Error::invalid(
                "frost.damping",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// Global coefficient of variation `std / mean` (population std).
pub fn coefficient_of_variation(img: &Raster) -> f64 {
    let mean = img.mean();
    if mean == 0.0 {
        return 0.0;
    }
    let var = img
        .data()
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / img.len() as f64;
    var.sqrt() / mean
}

/// Exponent coefficient `(4 / (n cv^2)) (var / mean^2)`; zero when the
/// kernel is flat.
pub fn frost_damping(n: usize, cv: f64, local_mean: f64, local_var: f64) -> f64 {
    if local_var == 0.0 || cv == 0.0 {
        return 0.0;
    }
    (4.0 / (n as f64 * cv * cv)) * (local_var / (local_mean * local_mean))
}

/// Frost weights for one kernel (row-major, `n*n`), normalized to sum 1.
/// `None` when the kernel mean is zero.
pub fn frost_weights(kernel: &[f64], n: usize, cv: f64, damping_scale: f64) -> Option<Vec<f64>> {
    let len = kernel.len() as f64;
    let mean = kernel.iter().sum::<f64>() / len;
    if mean == 0.0 {
        return None;
    }
    let var = kernel.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len;
    let alpha = damping_scale * frost_damping(n, cv, mean, var);
    let r = (n / 2) as isize;
    let mut w: Vec<f64> = (0..n * n)
        .map(|i| {
            let dx = (i % n) as isize - r;
            let dy = (i / n) as isize - r;
            (-alpha * (dx.abs() + dy.abs()) as f64).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    Some(w)
}

pub fn frost(img: &Raster, p: &FrostParams) -> Result<Raster> {
    p.validate()?;
    let n = p.size;
    let r = (n / 2) as isize;
    let cv = coefficient_of_variation(img);
    let (w, h) = img.dims();
    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut kernel = vec![0.0; n * n];
            (0..w)
                .map(|x| {
                    for (i, k) in kernel.iter_mut().enumerate() {
                        let dx = (i % n) as isize - r;
                        let dy = (i / n) as isize - r;
                        *k = img.get_clamped(x as isize + dx, y as isize + dy) as f64;
                    }
                    match frost_weights(&kernel, n, cv, p.damping_scale) {
                        Some(weights) => {
                            debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                            to_u8(weights.iter().zip(&kernel).map(|(a, b)| a * b).sum())
                        }
                        None => img.get(x, y),
                    }
                })
                .collect()
        })
        .collect();
    Raster::new(w, h, rows.concat())
}

pub fn median(img: &Raster, n: usize) -> Result<Raster> {
    check_odd("median.size", n)?;
    let r = (n / 2) as isize;
    let (w, h) = img.dims();
    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut window = Vec::with_capacity(n * n);
            (0..w)
                .map(|x| {
                    window.clear();
                    for dy in -r..=r {
                        for dx in -r..=r {
                            window.push(img.get_clamped(x as isize + dx, y as isize + dy));
                        }
                    }
                    let mid = window.len() / 2;
                    *window.select_nth_unstable(mid).1
                })
                .collect()
        })
        .collect();
    Raster::new(w, h, rows.concat())
}
