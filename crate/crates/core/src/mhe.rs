//! Minimum within-class variance multi-histogram equalization.
//!
//! The gray range is split into `k` contiguous classes minimizing the summed
//! within-class variance of the normalized histogram. The optimal split for
//! every `(classes, last level)` pair is found by dynamic programming; the
//! class count can be chosen automatically by trading discrepancy against
//! `log2 k`. Each class is then equalized onto its own gray band.

use crate::error::{Error, Result};
use crate::raster::{histogram, Histogram, PixelMask, Raster, LEVELS};

/// Largest class count accepted by [`threshold_matrix`].
pub const MAX_CLASSES: usize = 64;
pub const DEFAULT_RHO: f64 = 1e-4;
pub const DEFAULT_MAX_CLASSES: usize = 8;

/// How many classes to decompose into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassCount {
    Fixed(usize),
    Auto { rho: f64, max_classes: usize },
}

impl Default for ClassCount {
    fn default() -> Self {
        ClassCount::Auto {
            rho: DEFAULT_RHO,
            max_classes: DEFAULT_MAX_CLASSES,
        }
    }
}

/// `phi[p][q]`: probability-weighted squared deviation from the class mean
/// over levels `p..=q`. Built with a weighted running-variance update so
/// every entry is computed in a single forward sweep from `p`.
struct ClassCost {
    phi: Vec<f64>,
}

impl ClassCost {
    fn new(hist: &Histogram) -> Self {
        let mut phi = vec![0.0; LEVELS * LEVELS];
        for p in 0..LEVELS {
            let (mut mass, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
            for q in p..LEVELS {
                let w = hist.probability(q);
                if w > 0.0 && mass == 0.0 {
                    mass = w;
                    mean = q as f64;
                } else if w > 0.0 {
                    let new_mass = mass + w;
                    let delta = q as f64 - mean;
                    mean += delta * w / new_mass;
                    m2 += w * delta * (q as f64 - mean);
                    mass = new_mass;
                }
                phi[p * LEVELS + q] = m2.max(0.0);
            }
        }
        ClassCost { phi }
    }

    #[inline]
    fn get(&self, p: usize, q: usize) -> f64 {
        self.phi[p * LEVELS + q]
    }
}

/// Within-class discrepancy of the gray levels `p..=q`.
pub fn discrepancy(hist: &Histogram, p: u8, q: u8) -> Result<f64> {
    if p > q {
        return Err(Error::invalid("discrepancy", format!("p {p} > q {q}")));
    }
    let (p, q) = (p as usize, q as usize);
    let mass: f64 = (p..=q).map(|l| hist.probability(l)).sum();
    if mass == 0.0 {
        return Ok(0.0);
    }
    let mean = (p..=q).map(|l| l as f64 * hist.probability(l)).sum::<f64>() / mass;
    Ok((p..=q)
        .map(|l| (l as f64 - mean).powi(2) * hist.probability(l))
        .sum())
}

/// Optimal cumulative discrepancies and predecessor thresholds.
#[derive(Debug, Clone)]
pub struct ThresholdMatrix {
    max_classes: usize,
    /// `d[(k-1) * L + q]`: best discrepancy of levels `0..=q` in `k` classes.
    d: Vec<f64>,
    /// `pt[(k-1) * L + q]`: last level of class `k-1` in that optimum.
    pt: Vec<Option<u8>>,
}

impl ThresholdMatrix {
    pub fn max_classes(&self) -> usize {
        self.max_classes
    }

    /// Best discrepancy for `levels 0..=q` in `k` classes; `+inf` when
    /// `q + 1 < k`.
    pub fn discrepancy(&self, k: usize, q: usize) -> f64 {
        self.d[(k - 1) * LEVELS + q]
    }

    /// Total discrepancy `Disc(k)` over the full gray range.
    pub fn disc(&self, k: usize) -> f64 {
        self.discrepancy(k, LEVELS - 1)
    }

    pub fn predecessor(&self, k: usize, q: usize) -> Option<u8> {
        self.pt[(k - 1) * LEVELS + q]
    }
}

pub fn threshold_matrix(hist: &Histogram, max_classes: usize) -> Result<ThresholdMatrix> {
    if !(1..=MAX_CLASSES).contains(&max_classes) {
        return Err(Error::invalid(
            "max_classes",
            format!("{max_classes} outside [1, {MAX_CLASSES}]"),
        ));
    }
    let cost = ClassCost::new(hist);
    let mut d = vec![f64::INFINITY; max_classes * LEVELS];
    let mut pt = vec![None; max_classes * LEVELS];
    for q in 0..LEVELS {
        d[q] = cost.get(0, q);
    }
    for k in 2..=max_classes {
        let (prev, cur) = d.split_at_mut((k - 1) * LEVELS);
        let prev = &prev[(k - 2) * LEVELS..];
        let cur = &mut cur[..LEVELS];
        for q in (k - 1)..LEVELS {
            let mut best = f64::INFINITY;
            let mut arg = None;
            // The previous k-1 classes need at least k-1 levels: l >= k-2.
            for l in (k - 2)..q {
                let v = prev[l] + cost.get(l + 1, q);
                if v < best {
                    best = v;
                    arg = Some(l as u8);
                }
            }
            cur[q] = best;
            pt[(k - 1) * LEVELS + q] = arg;
        }
    }
    Ok(ThresholdMatrix { max_classes, d, pt })
}

/// A split of the gray range into contiguous classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Last level of each class but the final one, strictly ascending.
    pub thresholds: Vec<u8>,
    /// Inclusive `[lo, hi]` range of each class, tiling `[0, 255]`.
    pub bounds: Vec<(u8, u8)>,
}

impl Decomposition {
    pub fn from_thresholds(thresholds: Vec<u8>) -> Result<Self> {
        if thresholds.windows(2).any(|w| w[0] >= w[1]) || thresholds.last() == Some(&255) {
            return Err(Error::invalid(
                "thresholds",
                "must be strictly ascending below 255",
            ));
        }
        let mut bounds = Vec::with_capacity(thresholds.len() + 1);
        let mut lo = 0u8;
        for &t in &thresholds {
            bounds.push((lo, t));
            lo = t + 1;
        }
        bounds.push((lo, 255));
        Ok(Decomposition { thresholds, bounds })
    }

    pub fn classes(&self) -> usize {
        self.bounds.len()
    }

    /// Index of the class containing `level`.
    pub fn class_of(&self, level: u8) -> usize {
        self.thresholds.partition_point(|&t| t < level)
    }
}

/// Back-traces the optimal thresholds for `k` classes.
pub fn optimal_thresholds(tm: &ThresholdMatrix, k: usize) -> Result<Decomposition> {
    if k == 0 || k > tm.max_classes {
        return Err(Error::invalid(
            "k",
            format!("{k} outside [1, {}]", tm.max_classes),
        ));
    }
    let mut thresholds = vec![0u8; k - 1];
    let mut last = LEVELS - 1;
    for j in (1..k).rev() {
        let t = tm
            .predecessor(j + 1, last)
            .expect("a predecessor exists whenever q >= k - 1");
        thresholds[j - 1] = t;
        last = t as usize;
    }
    Decomposition::from_thresholds(thresholds)
}

/// Class count minimizing `rho * Disc(k) + log2 k`; ties go to the smaller `k`.
pub fn auto_k(hist: &Histogram, rho: f64, max_classes: usize) -> Result<usize> {
    let tm = threshold_matrix(hist, max_classes)?;
    auto_k_from(&tm, rho)
}

pub fn auto_k_from(tm: &ThresholdMatrix, rho: f64) -> Result<usize> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::invalid("rho", "must be positive"));
    }
    let mut best = (f64::INFINITY, 1);
    for k in 1..=tm.max_classes() {
        let c = rho * tm.disc(k) + (k as f64).log2();
        if c < best.0 {
            best = (c, k);
        }
    }
    Ok(best.1)
}

/// Decomposes the histogram and equalizes each class onto its own band.
pub fn mwcvmhe_equalize(img: &Raster, count: ClassCount) -> Result<Raster> {
    let hist = histogram(img);
    let (tm, k) = match count {
        ClassCount::Fixed(k) => (threshold_matrix(&hist, k)?, k),
        ClassCount::Auto { rho, max_classes } => {
            let tm = threshold_matrix(&hist, max_classes)?;
            let k = auto_k_from(&tm, rho)?;
            (tm, k)
        }
    };
    let dec = optimal_thresholds(&tm, k)?;
    Ok(equalize_classes(img, &dec))
}

/// Equalizes each class of `dec` onto its `[lo, hi]` band.
pub fn equalize_classes(img: &Raster, dec: &Decomposition) -> Raster {
    let hist = histogram(img);
    let mut lut: [u8; LEVELS] = std::array::from_fn(|v| v as u8);
    for &(lo, hi) in &dec.bounds {
        let mut bins = [0u64; LEVELS];
        bins[lo as usize..=hi as usize].copy_from_slice(&hist.bins()[lo as usize..=hi as usize]);
        // Empty classes keep the identity mapping.
        if let Ok(class_hist) = Histogram::from_bins(bins) {
            let class_lut = class_hist.equalization_lut(lo, hi);
            lut[lo as usize..=hi as usize].copy_from_slice(&class_lut[lo as usize..=hi as usize]);
        }
    }
    img.map_lut(&lut)
}

/// Per-class masks for `dec` over `img`.
pub fn class_masks(img: &Raster, dec: &Decomposition) -> Vec<PixelMask> {
    dec.bounds
        .iter()
        .map(|&(lo, hi)| PixelMask::from_values(img, |v| (lo..=hi).contains(&v)))
        .collect()
}
