//! The named enhancement methods, built from the segmentation, enhancer,
//! CLAHE, filter and multi-histogram blocks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clahe::{clahe, multilayer, ClaheParams, LayerSet, DEFAULT_CLIP_LIMIT};
use crate::enhance::{alrs, edbi, epce, AlrsParams, EdbiParams, EpceParams};
use crate::error::{Error, Result};
use crate::filters::{frost, median, FrostParams};
use crate::hvs::{segment_image, HvsCoefficients, Region, Segmentation};
use crate::mhe::{mwcvmhe_equalize, ClassCount, MAX_CLASSES};
use crate::raster::{entropy, equalize, equalize_masked, to_u8, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodId {
    #[serde(rename = "HVS")]
    Hvs,
    #[serde(rename = "HVSedge")]
    HvsEdge,
    #[serde(rename = "HVSEDBI")]
    HvsEdbi,
    #[serde(rename = "MCLAHEFROST")]
    MclaheFrost,
    #[serde(rename = "MCLAHEMHE")]
    MclaheMhe,
    #[serde(rename = "MCLAHEEDBI")]
    MclaheEdbi,
    #[serde(rename = "MCLAHEALRS")]
    MclaheAlrs,
    #[serde(rename = "HE")]
    He,
    #[serde(rename = "CLAHE")]
    Clahe,
}

impl MethodId {
    pub const ALL: [MethodId; 9] = [
        MethodId::Hvs,
        MethodId::HvsEdge,
        MethodId::HvsEdbi,
        MethodId::MclaheFrost,
        MethodId::MclaheMhe,
        MethodId::MclaheEdbi,
        MethodId::MclaheAlrs,
        MethodId::He,
        MethodId::Clahe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Hvs => "HVS",
            MethodId::HvsEdge => "HVSedge",
            MethodId::HvsEdbi => "HVSEDBI",
            MethodId::MclaheFrost => "MCLAHEFROST",
            MethodId::MclaheMhe => "MCLAHEMHE",
            MethodId::MclaheEdbi => "MCLAHEEDBI",
            MethodId::MclaheAlrs => "MCLAHEALRS",
            MethodId::He => "HE",
            MethodId::Clahe => "CLAHE",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("method", format!("unknown method `{s}`")))
    }
}

/// How the three filtered CLAHE layers are weighted before merging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MergeWeights {
    Fixed([f64; 3]),
    /// Proportional to each layer's entropy distance from the input.
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeConfig {
    pub weights: MergeWeights,
    /// Weight of the input image in the final blend.
    pub alpha: f64,
    /// Weight of the merged layer image in the final blend.
    pub beta: f64,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig {
            weights: MergeWeights::Fixed([0.7, 0.2, 0.1]),
            alpha: 0.9,
            beta: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub hvs: HvsCoefficients,
    pub epce: EpceParams,
    pub edbi: EdbiParams,
    pub clip_limit: f64,
    pub frost: FrostParams,
    pub merge: MergeConfig,
    pub alrs: AlrsParams,
    pub mhe: ClassCount,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            hvs: HvsCoefficients::default(),
            epce: EpceParams::default(),
            edbi: EdbiParams::default(),
            clip_limit: DEFAULT_CLIP_LIMIT,
            frost: FrostParams::default(),
            merge: MergeConfig::default(),
            alrs: AlrsParams::default(),
            mhe: ClassCount::default(),
        }
    }
}

const WEIGHT_TOLERANCE: f64 = 1e-9;

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let MergeConfig {
            weights,
            alpha,
            beta,
        } = self.merge;
        if alpha < 0.0 || beta < 0.0 || (alpha + beta - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::invalid(
                "merge.alpha",
                format!("alpha {alpha} and beta {beta} must be non-negative and sum to 1"),
            ));
        }
        if let MergeWeights::Fixed(w) = weights {
            if w.iter().any(|&v| v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > WEIGHT_TOLERANCE
            {
                return Err(Error::invalid(
                    "merge.weights",
                    format!("{w:?} must be non-negative and sum to 1"),
                ));
            }
        }
        if !(self.clip_limit > 1.0) {
            return Err(Error::invalid("clahe.clip", "must exceed 1"));
        }
        if self.hvs.alpha1 > self.hvs.alpha2 {
            return Err(Error::invalid("hvs.alpha1", "must not exceed alpha2"));
        }
        self.epce.validate()?;
        self.edbi.validate()?;
        self.alrs.validate()?;
        self.frost.validate()?;
        let classes = match self.mhe {
            ClassCount::Fixed(k) => k,
            ClassCount::Auto { rho, max_classes } => {
                if !(rho > 0.0) {
                    return Err(Error::invalid("mhe.rho", "must be positive"));
                }
                max_classes
            }
        };
        if !(1..=MAX_CLASSES).contains(&classes) {
            return Err(Error::invalid(
                "mhe.k",
                format!("{classes} outside [1, {MAX_CLASSES}]"),
            ));
        }
        Ok(())
    }
}

/// An enhanced image plus what produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Enhanced {
    pub image: Raster,
    pub method: MethodId,
    /// The input was constant, so segmentation was skipped and plain HE used.
    pub degenerate: bool,
}

/// Pixel source for one region when assembling a segmented result.
enum Source<'a> {
    Original,
    From(&'a Raster),
}

fn assemble(seg: &Segmentation, sources: [Source<'_>; 4], original: &Raster) -> Result<Raster> {
    for s in &sources {
        if let Source::From(r) = s {
            original.check_same_dims(r)?;
        }
    }
    let data = seg
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &r)| match sources[r as usize] {
            Source::Original => original.data()[i],
            Source::From(img) => img.data()[i],
        })
        .collect();
    Raster::new(original.width(), original.height(), data)
}

/// Masked HE of one region, or `None` if it is empty.
fn region_he(img: &Raster, seg: &Segmentation, region: Region) -> Result<Option<Raster>> {
    match equalize_masked(img, seg.mask(region)) {
        Ok(r) => Ok(Some(r)),
        Err(Error::EmptyMask) => Ok(None),
        Err(e) => Err(e),
    }
}

fn src(r: &Option<Raster>) -> Source<'_> {
    r.as_ref().map_or(Source::Original, Source::From)
}

fn segmented(
    img: &Raster,
    cfg: &PipelineConfig,
    method: MethodId,
    build: impl FnOnce(&Segmentation) -> Result<Raster>,
) -> Result<Enhanced> {
    cfg.validate()?;
    match segment_image(img, cfg.hvs) {
        Ok((_, seg)) => Ok(Enhanced {
            image: build(&seg)?,
            method,
            degenerate: false,
        }),
        Err(Error::DegenerateImage) => Ok(Enhanced {
            image: equalize(img),
            method,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Equalizes Im1..Im3 separately; Im4 keeps the input values.
pub fn run_hvs(img: &Raster, cfg: &PipelineConfig) -> Result<Enhanced> {
    segmented(img, cfg, MethodId::Hvs, |seg| {
        let parts = [Region::Im1, Region::Im2, Region::Im3].map(|r| region_he(img, seg, r));
        let [a, b, c] = parts;
        let (a, b, c) = (a?, b?, c?);
        assemble(seg, [src(&a), src(&b), src(&c), Source::Original], img)
    })
}

/// Im1 and Im2 by masked HE, Im4 by EPCE; Im3 keeps the input.
pub fn run_hvsedge(img: &Raster, cfg: &PipelineConfig) -> Result<Enhanced> {
    segmented(img, cfg, MethodId::HvsEdge, |seg| {
        let im1 = region_he(img, seg, Region::Im1)?;
        let im2 = region_he(img, seg, Region::Im2)?;
        let im4 = epce(img, &cfg.epce)?;
        assemble(
            seg,
            [src(&im1), src(&im2), Source::Original, Source::From(&im4)],
            img,
        )
    })
}

/// Im1 by the dark-blurred-image scheme, Im2 by masked HE, Im4 by EPCE;
/// Im3 keeps the input.
pub fn run_hvsedbi(img: &Raster, cfg: &PipelineConfig) -> Result<Enhanced> {
    segmented(img, cfg, MethodId::HvsEdbi, |seg| {
        let im1 = edbi(img, &cfg.edbi)?;
        let im2 = region_he(img, seg, Region::Im2)?;
        let im4 = epce(img, &cfg.epce)?;
        assemble(
            seg,
            [
                Source::From(&im1),
                src(&im2),
                Source::Original,
                Source::From(&im4),
            ],
            img,
        )
    })
}

/// Normalized merge weights for the three filtered layers.
pub fn merge_weights(input: &Raster, filtered: [&Raster; 3], mode: MergeWeights) -> [f64; 3] {
    match mode {
        MergeWeights::Fixed(w) => w,
        MergeWeights::Entropy => {
            let ex = entropy(input);
            let d = filtered.map(|l| (entropy(l) - ex).abs());
            let total: f64 = d.iter().sum();
            if total > 0.0 {
                d.map(|v| v / total)
            } else {
                [1.0 / 3.0; 3]
            }
        }
    }
}

/// Stage outputs of the multilayer merge, exposed for inspection.
#[derive(Debug, Clone)]
pub struct MultilayerStages {
    pub layers: LayerSet,
    pub filtered: [Raster; 3],
    pub weights: [f64; 3],
    /// Weighted layer sum after the 3x3 median.
    pub merged: Raster,
    pub output: Raster,
}

pub fn mclahefrost_stages(img: &Raster, cfg: &PipelineConfig) -> Result<MultilayerStages> {
    cfg.validate()?;
    let layers = multilayer(img, cfg.clip_limit)?;
    let filtered: Vec<Result<Raster>> = {
        use rayon::prelude::*;
        layers
            .layers()
            .into_par_iter()
            .map(|l| frost(l, &cfg.frost))
            .collect()
    };
    let mut it = filtered.into_iter();
    let filtered: [Raster; 3] = [
        it.next().unwrap()?,
        it.next().unwrap()?,
        it.next().unwrap()?,
    ];
    let weights = merge_weights(
        img,
        [&filtered[0], &filtered[1], &filtered[2]],
        cfg.merge.weights,
    );

    let sum: Vec<u8> = (0..img.len())
        .map(|i| {
            to_u8(
                weights[0] * filtered[0].data()[i] as f64
                    + weights[1] * filtered[1].data()[i] as f64
                    + weights[2] * filtered[2].data()[i] as f64,
            )
        })
        .collect();
    let merged = median(&Raster::new(img.width(), img.height(), sum)?, 3)?;

    let (a, b) = (cfg.merge.alpha, cfg.merge.beta);
    let out: Vec<u8> = img
        .data()
        .iter()
        .zip(merged.data())
        .map(|(&x, &p)| to_u8(a * x as f64 + b * p as f64))
        .collect();
    let output = Raster::new(img.width(), img.height(), out)?;
    Ok(MultilayerStages {
        layers,
        filtered,
        weights,
        merged,
        output,
    })
}

pub fn run_mclahefrost(img: &Raster, cfg: &PipelineConfig) -> Result<Enhanced> {
    Ok(Enhanced {
        image: mclahefrost_stages(img, cfg)?.output,
        method: MethodId::MclaheFrost,
        degenerate: false,
    })
}

/// Applies a contrast stage to the multilayer output.
pub fn run_mclahe_variant(
    img: &Raster,
    variant: MethodId,
    cfg: &PipelineConfig,
) -> Result<Enhanced> {
    let base = run_mclahefrost(img, cfg)?.image;
    let image = match variant {
        MethodId::MclaheMhe => mwcvmhe_equalize(&base, cfg.mhe)?,
        MethodId::MclaheEdbi => edbi(&base, &cfg.edbi)?,
        MethodId::MclaheAlrs => alrs(&base, &cfg.alrs)?,
        other => {
            return Err(Error::invalid(
                "variant",
                format!("{other} is not a multilayer contrast variant"),
            ))
        }
    };
    Ok(Enhanced {
        image,
        method: variant,
        degenerate: false,
    })
}

/// Tile side for the plain CLAHE baseline: an 8x8 tile grid.
fn baseline_clahe(img: &Raster, cfg: &PipelineConfig) -> Result<Raster> {
    let p = ClaheParams {
        tile_width: (img.width() / 8).max(2).min(img.width()),
        tile_height: (img.height() / 8).max(2).min(img.height()),
        clip_limit: cfg.clip_limit,
    };
    clahe(img, &p)
}

/// Runs any method on a grayscale image.
pub fn run(method: MethodId, img: &Raster, cfg: &PipelineConfig) -> Result<Enhanced> {
    match method {
        MethodId::Hvs => run_hvs(img, cfg),
        MethodId::HvsEdge => run_hvsedge(img, cfg),
        MethodId::HvsEdbi => run_hvsedbi(img, cfg),
        MethodId::MclaheFrost => run_mclahefrost(img, cfg),
        MethodId::MclaheMhe | MethodId::MclaheEdbi | MethodId::MclaheAlrs => {
            run_mclahe_variant(img, method, cfg)
        }
        MethodId::He => Ok(Enhanced {
            image: equalize(img),
            method,
            degenerate: false,
        }),
        MethodId::Clahe => {
            cfg.validate()?;
            Ok(Enhanced {
                image: baseline_clahe(img, cfg)?,
                method,
                degenerate: false,
            })
        }
    }
}

/// Applies `method` to each color channel independently.
pub fn enhance_color(
    channels: [&Raster; 3],
    method: MethodId,
    cfg: &PipelineConfig,
) -> Result<[Enhanced; 3]> {
    let dims = channels[0].dims();
    if channels.iter().any(|c| c.dims() != dims) {
        return Err(Error::ChannelMismatch);
    }
    let (r, (g, b)) = rayon::join(
        || run(method, channels[0], cfg),
        || {
            rayon::join(
                || run(method, channels[1], cfg),
                || run(method, channels[2], cfg),
            )
        },
    );
    Ok([r?, g?, b?])
}
