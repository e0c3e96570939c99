//! Human-visual-system illumination segmentation.
//!
//! Each pixel gets a background intensity `B` (a weighted average of its
//! 4- and diagonal neighbors blended with itself) and a gradient `X'`
//! (mean absolute forward difference). Thresholds derived from the gray
//! span and the strongest gradient-to-background ratio then split the image
//! into three response regions plus a remainder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{PixelMask, Raster, ScalarField};

/// Region coefficients and the `K1` gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvsCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta: f64,
}

impl Default for HvsCoefficients {
    fn default() -> Self {
        HvsCoefficients {
            alpha1: 0.0,
            alpha2: 0.1,
            alpha3: 0.0,
            beta: -1.5,
        }
    }
}

/// Thresholds governing segmentation, derived from one image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeParams {
    /// Gray span `max - min`.
    pub gray_span: f64,
    /// Background thresholds `Bx1..Bx3`.
    pub bx: [f64; 3],
    /// Gradient thresholds `K1..K3`; `K3` is `+inf` when `Bx3 == 0`.
    pub k: [f64; 3],
    pub coefficients: HvsCoefficients,
}

/// Background intensity:
/// `B = [ (1/2)((1/4) sum_Q X + (1/(4 sqrt 2)) sum_Q' X) + X ] / 2`
/// where `Q` are the 4-neighbors and `Q'` the diagonals.
pub fn background_intensity(img: &Raster) -> ScalarField {
    let diag_w = 1.0 / (4.0 * std::f64::consts::SQRT_2);
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let px = |dx: isize, dy: isize| img.get_clamped(x + dx, y + dy) as f64;
            let cross = px(0, -1) + px(0, 1) + px(-1, 0) + px(1, 0);
            let diag = px(-1, -1) + px(1, -1) + px(-1, 1) + px(1, 1);
            let surround = 0.5 * (0.25 * cross + diag_w * diag);
            out.push((surround + px(0, 0)) / 2.0);
        }
    }
    ScalarField::from_parts(w, h, out)
}

pub fn gray_range(img: &Raster) -> u8 {
    let (lo, hi) = img.min_max();
    hi - lo
}

/// `X' = (|X - X_right| + |X - X_below|) / 2`; forward differences vanish
/// on the last column and row.
pub fn gradient_field(img: &Raster) -> ScalarField {
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let c = img.get_clamped(x, y) as f64;
            let g1 = c - img.get_clamped(x + 1, y) as f64;
            let g2 = c - img.get_clamped(x, y + 1) as f64;
            out.push((g1.abs() + g2.abs()) / 2.0);
        }
    }
    ScalarField::from_parts(w, h, out)
}

fn eye_params_from(
    img: &Raster,
    background: &ScalarField,
    gradient: &ScalarField,
    coeffs: HvsCoefficients,
) -> Result<EyeParams> {
    let HvsCoefficients {
        alpha1,
        alpha2,
        alpha3,
        beta,
    } = coeffs;
    if alpha1 > alpha2 {
        return Err(Error::invalid(
            "alpha1",
            format!("{alpha1} exceeds alpha2 {alpha2}"),
        ));
    }
    for (name, a) in [
        ("alpha1", alpha1),
        ("alpha2", alpha2),
        ("alpha3", alpha3),
        ("beta", beta),
    ] {
        if !a.is_finite() {
            return Err(Error::invalid(name, "must be finite"));
        }
    }
    let span = gray_range(img) as f64;
    if span == 0.0 {
        return Err(Error::DegenerateImage);
    }
    let bx = [alpha1 * span, alpha2 * span, alpha3 * span];

    let max_ratio = background
        .data()
        .iter()
        .zip(gradient.data())
        .filter(|(&b, _)| b > 0.0)
        .map(|(&b, &g)| g / b)
        .fold(0.0, f64::max);

    // A negative beta would make every gradient test vacuous.
    let k1 = beta.abs() / 100.0 * max_ratio;
    let k2 = k1 * bx[1].max(0.0).sqrt();
    let k3 = if bx[2] > 0.0 {
        k1 / bx[2]
    } else {
        f64::INFINITY
    };

    Ok(EyeParams {
        gray_span: span,
        bx,
        k: [k1, k2, k3],
        coefficients: coeffs,
    })
}

/// Derives the segmentation thresholds. Fails with
/// [`Error::DegenerateImage`] on constant images.
pub fn eye_params(img: &Raster, coeffs: HvsCoefficients) -> Result<EyeParams> {
    eye_params_from(
        img,
        &background_intensity(img),
        &gradient_field(img),
        coeffs,
    )
}

/// Illumination region of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Im1 = 0,
    Im2 = 1,
    Im3 = 2,
    /// Pixels no threshold claims.
    Im4 = 3,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Im1, Region::Im2, Region::Im3, Region::Im4];
}

/// Four disjoint masks that together cover every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    labels: Vec<Region>,
    masks: [PixelMask; 4],
    source: Raster,
}

impl Segmentation {
    /// Builds a segmentation from explicit per-pixel labels.
    pub fn from_labels(source: &Raster, labels: Vec<Region>) -> Result<Self> {
        let (w, h) = source.dims();
        if labels.len() != w * h {
            return Err(Error::BufferLength {
                expected: w * h,
                actual: labels.len(),
            });
        }
        let mut masks = std::array::from_fn(|_| PixelMask::empty(w, h));
        for (i, &r) in labels.iter().enumerate() {
            masks[r as usize].set_index(i, true);
        }
        Ok(Segmentation {
            labels,
            masks,
            source: source.clone(),
        })
    }

    pub fn mask(&self, region: Region) -> &PixelMask {
        &self.masks[region as usize]
    }

    pub fn masks(&self) -> &[PixelMask; 4] {
        &self.masks
    }

    pub fn labels(&self) -> &[Region] {
        &self.labels
    }

    pub fn source(&self) -> &Raster {
        &self.source
    }

    pub fn count(&self, region: Region) -> usize {
        self.labels.iter().filter(|&&r| r == region).count()
    }
}

fn classify(b: f64, g: f64, p: &EyeParams) -> Region {
    let [bx1, bx2, bx3] = p.bx;
    let [k1, k2, k3] = p.k;
    if b <= 0.0 {
        return Region::Im4;
    }
    if (bx1..=bx2).contains(&b) && g / b.sqrt() >= k2 {
        Region::Im1
    } else if (bx2..=bx3).contains(&b) && g / b >= k1 {
        Region::Im2
    } else if b >= bx3 && g / (b * b) >= k3 {
        Region::Im3
    } else {
        Region::Im4
    }
}

/// Assigns each pixel to the first region whose conditions hold, in the
/// order Im1, Im2, Im3; everything else lands in Im4.
pub fn segment(img: &Raster, params: &EyeParams) -> Segmentation {
    let background = background_intensity(img);
    let gradient = gradient_field(img);
    segment_fields(img, &background, &gradient, params)
}

fn segment_fields(
    img: &Raster,
    background: &ScalarField,
    gradient: &ScalarField,
    params: &EyeParams,
) -> Segmentation {
    let labels = background
        .data()
        .iter()
        .zip(gradient.data())
        .map(|(&b, &g)| classify(b, g, params))
        .collect();
    Segmentation::from_labels(img, labels).expect("fields share the image shape")
}

/// Computes thresholds and segments in one pass over the derived fields.
pub fn segment_image(img: &Raster, coeffs: HvsCoefficients) -> Result<(EyeParams, Segmentation)> {
    let background = background_intensity(img);
    let gradient = gradient_field(img);
    let params = eye_params_from(img, &background, &gradient, coeffs)?;
    let seg = segment_fields(img, &background, &gradient, &params);
    Ok((params, seg))
}

/// Takes region `i` pixels from `parts[i]` (Im1..Im3) and Im4 pixels from
/// `original`.
pub fn recombine(seg: &Segmentation, parts: [&Raster; 3], original: &Raster) -> Result<Raster> {
    original.check_same_dims(seg.source())?;
    for p in parts {
        original.check_same_dims(p)?;
    }
    let data = seg
        .labels
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            Region::Im4 => original.data()[i],
            r => parts[*r as usize].data()[i],
        })
        .collect();
    Raster::new(original.width(), original.height(), data)
}
