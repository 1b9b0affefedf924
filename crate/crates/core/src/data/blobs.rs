use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, Sample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub center: Vec<f64>,
    /// Standard deviation per coordinate. Zero puts every point on the center.
    pub spread: f64,
    pub count: usize,
}

/// Isotropic Gaussian blobs, one class per blob in listed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub name: String,
    pub blobs: Vec<Blob>,
}

/// Points are clipped to the unit cube.
pub fn gen_blobs(spec: &BlobSpec, seed: u64) -> Result<Dataset> {
    if spec.blobs.len() < 2 {
        return Err(Error::contract("at least two blobs are required"));
    }
    let dim = spec.blobs[0].center.len();
    for (i, b) in spec.blobs.iter().enumerate() {
        if b.center.len() != dim || dim == 0 {
            return Err(Error::contract(format!(
                "blob {i} has a mismatched or empty center"
            )));
        }
        if !(b.spread >= 0.0 && b.spread.is_finite()) {
            return Err(Error::contract(format!(
                "blob {i} has invalid spread {}",
                b.spread
            )));
        }
        if b.count == 0 {
            return Err(Error::contract(format!("blob {i} has zero points")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    for (label, b) in spec.blobs.iter().enumerate() {
        for _ in 0..b.count {
            let features = b
                .center
                .iter()
                .map(|c| {
                    let z: f64 = rng.sample(StandardNormal);
                    (c + b.spread * z).clamp(0.0, 1.0)
                })
                .collect();
            samples.push(Sample::new(features, label));
        }
    }
    Dataset::new(&spec.name, spec.blobs.len(), samples)
}
