//! Contrast-limited adaptive histogram equalization and the three-scale
//! layer stack built from it.
//!
//! The image is cut into a grid of tiles. Each tile's histogram is clipped
//! at `clip_limit * tile_pixels / 256`, the excess is spread back over all
//! bins, and the tile's equalization table is built from the result. Each
//! output pixel blends the tables of the (up to) four tiles whose centers
//! surround it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Histogram, Raster, LEVELS};

pub const DEFAULT_CLIP_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaheParams {
    pub tile_width: usize,
    pub tile_height: usize,
    /// Multiple of the uniform bin height; `f64::INFINITY` disables clipping.
    pub clip_limit: f64,
}

impl ClaheParams {
    fn validate(&self, img: &Raster) -> Result<()> {
        if self.tile_width < 2 || self.tile_height < 2 {
            return Err(Error::invalid(
                "clahe.tile",
                "tile sides must be at least 2",
            ));
        }
        if self.tile_width > img.width() || self.tile_height > img.height() {
            return Err(Error::TileTooLarge {
                tile: (self.tile_width, self.tile_height),
                image: img.dims(),
            });
        }
        if !(self.clip_limit > 1.0) {
            return Err(Error::invalid(
                "clahe.clip",
                format!("{} must exceed 1", self.clip_limit),
            ));
        }
        Ok(())
    }
}

/// Clips every bin at `ceiling` and redistributes the excess: an equal
/// share to every bin, then the remainder one count at a time from bin 0.
pub fn clip_histogram(bins: &mut [u64; LEVELS], ceiling: u64) {
    let mut excess = 0;
    for b in bins.iter_mut() {
        if *b > ceiling {
            excess += *b - ceiling;
            *b = ceiling;
        }
    }
    let share = excess / LEVELS as u64;
    let rest = (excess % LEVELS as u64) as usize;
    for (i, b) in bins.iter_mut().enumerate() {
        *b += share + u64::from(i < rest);
    }
}

/// Tile boundaries along one axis: `(start, end)` half-open.
fn tile_spans(len: usize, tile: usize) -> Vec<(usize, usize)> {
    (0..len.div_ceil(tile))
        .map(|i| (i * tile, ((i + 1) * tile).min(len)))
        .collect()
}

/// For a pixel coordinate, the two surrounding tile indices and the weight
/// of the second.
fn bracket(pos: usize, centers: &[f64]) -> (usize, usize, f64) {
    let p = pos as f64 + 0.5;
    let last = centers.len() - 1;
    if p <= centers[0] {
        return (0, 0, 0.0);
    }
    if p >= centers[last] {
        return (last, last, 0.0);
    }
    let i = centers.partition_point(|&c| c <= p) - 1;
    let w = (p - centers[i]) / (centers[i + 1] - centers[i]);
    (i, i + 1, w)
}

pub fn clahe(img: &Raster, p: &ClaheParams) -> Result<Raster> {
    p.validate(img)?;
    let xs = tile_spans(img.width(), p.tile_width);
    let ys = tile_spans(img.height(), p.tile_height);

    let mut luts = Vec::with_capacity(xs.len() * ys.len());
    for &(y0, y1) in &ys {
        for &(x0, x1) in &xs {
            let mut bins = [0u64; LEVELS];
            for y in y0..y1 {
                for &v in &img.data()[y * img.width() + x0..y * img.width() + x1] {
                    bins[v as usize] += 1;
                }
            }
            let n = ((x1 - x0) * (y1 - y0)) as f64;
            if p.clip_limit.is_finite() {
                let ceiling = (p.clip_limit * n / LEVELS as f64).floor().max(1.0) as u64;
                clip_histogram(&mut bins, ceiling);
            }
            let hist = Histogram::from_bins(bins)?;
            luts.push(hist.equalization_lut(0, 255));
        }
    }

    let cx: Vec<f64> = xs.iter().map(|&(a, b)| (a + b) as f64 / 2.0).collect();
    let cy: Vec<f64> = ys.iter().map(|&(a, b)| (a + b) as f64 / 2.0).collect();
    let xb: Vec<_> = (0..img.width()).map(|x| bracket(x, &cx)).collect();
    let nx = xs.len();

    let mut out = Vec::with_capacity(img.len());
    for y in 0..img.height() {
        let (ty0, ty1, wy) = bracket(y, &cy);
        for (x, &(tx0, tx1, wx)) in xb.iter().enumerate() {
            let v = img.get(x, y) as usize;
            let at = |ty: usize, tx: usize| luts[ty * nx + tx][v] as f64;
            let top = at(ty0, tx0) * (1.0 - wx) + at(ty0, tx1) * wx;
            let bottom = at(ty1, tx0) * (1.0 - wx) + at(ty1, tx1) * wx;
            out.push(crate::raster::to_u8(top * (1.0 - wy) + bottom * wy));
        }
    }
    Raster::new(img.width(), img.height(), out)
}

/// Smallest image side accepted by [`multilayer`].
pub const MIN_LAYER_SIDE: usize = 16;

/// CLAHE at three window scales.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSet {
    /// Window `W/2 x H/2`: global brightness redistribution.
    pub h1: Raster,
    /// Window `W/4 x H/4`: small objects.
    pub h2: Raster,
    /// Window `W/8 x H/8`: borders.
    pub h3: Raster,
}

impl LayerSet {
    pub fn layers(&self) -> [&Raster; 3] {
        [&self.h1, &self.h2, &self.h3]
    }
}

/// Tile sizes used for the three layers.
pub fn layer_windows(width: usize, height: usize) -> [(usize, usize); 3] {
    [2, 4, 8].map(|d| ((width / d).max(2), (height / d).max(2)))
}

pub fn multilayer(img: &Raster, clip_limit: f64) -> Result<LayerSet> {
    let (w, h) = img.dims();
    if w < MIN_LAYER_SIDE || h < MIN_LAYER_SIDE {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: MIN_LAYER_SIDE,
        });
    }
    let params = layer_windows(w, h).map(|(tile_width, tile_height)| ClaheParams {
        tile_width,
        tile_height,
        clip_limit,
    });
    let (h1, (h2, h3)) = rayon::join(
        || clahe(img, &params[0]),
        || rayon::join(|| clahe(img, &params[1]), || clahe(img, &params[2])),
    );
    Ok(LayerSet {
        h1: h1?,
        h2: h2?,
        h3: h3?,
    })
}
