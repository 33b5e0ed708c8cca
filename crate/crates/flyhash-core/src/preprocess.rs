//! Whole-dataset preprocessing transforms.
//!
//! Four techniques plus the identity: the shift-rescale-floor scheme of
//! the original algorithm, mean centering, L2 normalization of every
//! vector, and mean centering followed by normalization. Statistics (row
//! minima, mean vector) come from the same vector subset being embedded.

use alloc::vec::Vec;

use crate::dataset::DenseDataset;
use crate::error::CoreError;

/// Which preprocessing to apply to a dataset before projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreprocessSpec {
    None,
    /// Shift each component by the absolute value of its minimum across
    /// the dataset, rescale each vector to mean `r`, floor to integers.
    Original { r: f64 },
    MeanCenter,
    L2Normalize,
    CenterNormalize,
}

impl PreprocessSpec {
    /// The component-mean target used in the original algorithm.
    pub const DEFAULT_R: f64 = 100.0;

    pub fn name(&self) -> &'static str {
        match self {
            PreprocessSpec::None => "none",
            PreprocessSpec::Original { .. } => "original",
            PreprocessSpec::MeanCenter => "mean_center",
            PreprocessSpec::L2Normalize => "l2_normalize",
            PreprocessSpec::CenterNormalize => "center_normalize",
        }
    }

    pub fn apply(&self, x: &DenseDataset) -> Result<DenseDataset, CoreError> {
        match *self {
            PreprocessSpec::None => Ok(x.clone()),
            PreprocessSpec::Original { r } => preprocess_original(x, r),
            PreprocessSpec::MeanCenter => Ok(mean_center(x)),
            PreprocessSpec::L2Normalize => l2_normalize(x),
            PreprocessSpec::CenterNormalize => center_normalize(x),
        }
    }
}

/// Shift each row to be nonnegative (add |row minimum|, unconditionally),
/// then scale every column so its mean is `r` and keep the integer part.
pub fn preprocess_original(x: &DenseDataset, r: f64) -> Result<DenseDataset, CoreError> {
    let d = x.dims();
    let shifts: Vec<f64> = (0..d).map(|i| libm::fabs(x.row_min(i))).collect();
    let mut values = Vec::with_capacity(d * x.count());
    for j in 0..x.count() {
        let col = x.column(j);
        let shifted: Vec<f64> = col.iter().zip(&shifts).map(|(v, s)| v + s).collect();
        let mean = shifted.iter().sum::<f64>() / d as f64;
        if mean == 0.0 {
            return Err(CoreError::ZeroMeanColumn { col: j });
        }
        let scale = r / mean;
        values.extend(shifted.iter().map(|v| libm::floor(scale * v)));
    }
    DenseDataset::new(d, x.count(), values, x.source_tag())
}

/// Subtract the across-dataset mean vector from every column.
pub fn mean_center(x: &DenseDataset) -> DenseDataset {
    let mean = x.mean_column();
    let mut values = Vec::with_capacity(x.dims() * x.count());
    for j in 0..x.count() {
        values.extend(x.column(j).iter().zip(&mean).map(|(v, m)| v - m));
    }
    DenseDataset::new(x.dims(), x.count(), values, x.source_tag()).expect("centered data is finite")
}

/// Divide every column by its Euclidean norm.
pub fn l2_normalize(x: &DenseDataset) -> Result<DenseDataset, CoreError> {
    let mut values = Vec::with_capacity(x.dims() * x.count());
    for j in 0..x.count() {
        let col = x.column(j);
        let norm = libm::sqrt(col.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return Err(CoreError::ZeroNormVector { index: j });
        }
        values.extend(col.iter().map(|v| v / norm));
    }
    DenseDataset::new(x.dims(), x.count(), values, x.source_tag())
}

/// Mean centering followed by L2 normalization.
pub fn center_normalize(x: &DenseDataset) -> Result<DenseDataset, CoreError> {
    l2_normalize(&mean_center(x))
}
