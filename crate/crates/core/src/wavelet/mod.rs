//! Tensor-product Daubechies wavelet analysis of sampled fields.

pub mod bins;
pub mod filters;
pub mod nterm;
pub mod transform;

pub use bins::{bin_cardinalities, classify, BinKey, CardinalityTable, Family, IndexBins};
pub use filters::WaveletSystem;
pub use nterm::{besov_norm, fit_rate, level_truncation_curve, nterm_curve, LevelGroups, NTermCurve, NormTag};
pub use transform::{analyze, CoeffField, Grid};
