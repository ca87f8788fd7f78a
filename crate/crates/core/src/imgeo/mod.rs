//! Cross-section image pipeline: decode, grayscale, histogram, threshold,
//! 3x3 morphology, 8-connected labeling and per-region geometry.

mod codec;
mod histogram;
mod image;
mod label;
mod morphology;
mod regionprops;
mod threshold;

pub use codec::{decode_gray, decode_image, decode_pgm, encode_pgm, DecodedImage};
pub use histogram::{bin_index, histogram, levels, Histogram, DEFAULT_BINS};
pub use image::{luma, to_gray, BinaryImage, GrayImage, LabelImage, RgbImage};
pub use label::label;
pub use morphology::{clean_mask, dilate, erode, CleanMode};
pub use regionprops::{
    export_features_csv, region_features, CentralMoments, Precision, RegionFeatures, ScaleSpec,
    FEATURES_CSV_HEADER,
};
pub use threshold::{between_class_variance, threshold_manual, threshold_otsu};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageError {
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error("unsupported image: {0}")]
    Unsupported(String),
    #[error("image data is truncated")]
    Truncated,
    #[error("invalid image dimensions: {0}")]
    Dimensions(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate image: constant intensity, automatic threshold is undefined")]
    DegenerateImage,
    #[error("no foreground regions after thresholding")]
    NoRegions,
}
