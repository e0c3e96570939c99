//! Point and region enhancement schemes used inside the pipelines.

pub mod alrs;
pub mod edbi;
pub mod epce;

pub use alrs::{alrs, pseudo_variance, AlrsParams};
pub use edbi::{contrast_map, edbi, unsharp_boost, EdbiParams};
pub use epce::{epce, epce_transfer, EpceParams};
