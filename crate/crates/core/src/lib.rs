//! Contrast enhancement for 8-bit grayscale and RGB images.
//!
//! Two families of methods are provided:
//!
//! * illumination-segmented histogram equalization ([`pipeline::run_hvs`]
//!   and its edge-preserving and dark-blurred-image variants), and
//! * a multilayer CLAHE stack denoised with a Frost filter and blended back
//!   into the input ([`pipeline::run_mclahefrost`]), optionally followed by a
//!   multi-histogram, dark-image or local region stretching stage.
//!
//! [`metrics`] holds PSNR, AMBE and CII for comparing results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clahe;
pub mod enhance;
pub mod error;
pub mod filters;
pub mod hvs;
pub mod metrics;
pub mod mhe;
pub mod pipeline;
pub mod raster;

pub use error::{Error, Result};
pub use pipeline::{run, Enhanced, MethodId, PipelineConfig};
pub use raster::{Histogram, PixelMask, Raster, ScalarField};
