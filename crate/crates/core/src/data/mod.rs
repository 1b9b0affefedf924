//! Dataset loading, splitting and synthetic generation.

mod blobs;
mod loaders;
mod split;

pub use blobs::{gen_blobs, Blob, BlobSpec};
pub use loaders::{
    detect_format, load_pima, load_wbc, parse_pima, parse_wbc, sha256_file, DatasetFormat,
    PIMA_EXPECTED, PIMA_FEATURES, PIMA_NAME, WBC_EXPECTED, WBC_FEATURES, WBC_NAME,
};
pub use split::{split, MinMaxScaler, SplitSpec};
