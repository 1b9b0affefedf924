use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{feature_key, Dataset, Sample, Task};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            seed: 7,
            stratified: true,
        }
    }
}

/// Per-feature min-max scaling fitted on one set of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(samples: &[Sample]) -> Self {
        let dim = samples[0].features.len();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for s in samples {
            for (j, v) in s.features.iter().enumerate() {
                min[j] = min[j].min(*v);
                max[j] = max[j].max(*v);
            }
        }
        Self { min, max }
    }

    /// Maps into `[0, 1]`, clamping values outside the fitted range.
    /// Constant features map to 0.
    pub fn transform(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let range = self.max[j] - self.min[j];
                if range > 0.0 {
                    ((v - self.min[j]) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Seeded shuffle-then-cut into a [`Task`] named after the dataset.
///
/// Both splits are min-max scaled with statistics of the training cut. Test
/// samples whose scaled features duplicate a training sample then move to
/// the training split, keeping the two disjoint.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<Task> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Split(format!(
            "train fraction {} outside (0, 1)",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples = dataset.samples();
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();

    let groups: Vec<Vec<usize>> = if spec.stratified {
        (0..dataset.class_count())
            .map(|c| {
                (0..samples.len())
                    .filter(|&i| samples[i].label == c)
                    .collect()
            })
            .collect()
    } else {
        vec![(0..samples.len()).collect()]
    };
    for mut group in groups {
        group.shuffle(&mut rng);
        let cut = (spec.train_fraction * group.len() as f64).round() as usize;
        train_idx.extend_from_slice(&group[..cut]);
        test_idx.extend_from_slice(&group[cut..]);
    }

    // Clamping can map distinct raw rows onto one point, so duplicates are
    // resolved after scaling. The scaler keeps the statistics of the cut.
    let raw_train: Vec<Sample> = train_idx.iter().map(|&i| samples[i].clone()).collect();
    let scaler = MinMaxScaler::fit(&raw_train);
    let scaled: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| scaler.transform(&s.features))
        .collect();
    let train_keys: HashSet<Vec<u64>> =
        train_idx.iter().map(|&i| feature_key(&scaled[i])).collect();
    let (dups, kept): (Vec<usize>, Vec<usize>) = test_idx
        .into_iter()
        .partition(|&i| train_keys.contains(&feature_key(&scaled[i])));
    train_idx.extend(dups);
    let mut test_idx = kept;
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    for c in 0..dataset.class_count() {
        for (idx, which) in [(&train_idx, "train"), (&test_idx, "test")] {
            if !idx.iter().any(|&i| samples[i].label == c) {
                return Err(Error::Split(format!(
                    "fraction {} leaves class {c} empty in the {which} split",
                    spec.train_fraction
                )));
            }
        }
    }

    let scale = |idx: &[usize]| -> Vec<Sample> {
        idx.iter()
            .map(|&i| Sample::new(scaled[i].clone(), samples[i].label))
            .collect()
    };
    let k = dataset.class_count();
    let train = Dataset::new(dataset.name(), k, scale(&train_idx))?;
    let test = Dataset::new(dataset.name(), k, scale(&test_idx))?;
    Task::new(dataset.name(), train, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forty() -> Dataset {
        let samples = (0..40)
            .map(|i| Sample::new(vec![i as f64, ((i * 17) % 40) as f64], i % 2))
            .collect();
        Dataset::new("forty", 2, samples).unwrap()
    }

    #[test]
    fn stratified_counts() {
        let spec = SplitSpec {
            train_fraction: 0.75,
            seed: 1,
            stratified: true,
        };
        let t = split(&forty(), &spec).unwrap();
        let moved = t.train().len() - 30;
        assert_eq!(t.train().len() + t.test().len(), 40);
        assert!(moved <= 2, "{moved} rows moved by clamping");
        assert!(t.train().class_counts().iter().all(|&c| c >= 15));
    }

    #[test]
    fn ten_samples_cut_four_plus_four() {
        let samples = (0..10)
            .map(|i| {
                Sample::new(
                    vec![i as f64, ((i * 3) % 10) as f64, ((i * 7) % 10) as f64],
                    i % 2,
                )
            })
            .collect();
        let d = Dataset::new("ten", 2, samples).unwrap();
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 1,
            stratified: true,
        };
        let t = split(&d, &spec).unwrap();
        assert_eq!(t.train().class_counts(), vec![4, 4]);
        assert_eq!(t.test().class_counts(), vec![1, 1]);
        let spec = SplitSpec {
            train_fraction: 0.999,
            ..spec
        };
        assert!(matches!(split(&d, &spec), Err(Error::Split(_))));
    }

    #[test]
    fn same_seed_same_split() {
        let spec = SplitSpec::default();
        assert_eq!(
            split(&forty(), &spec).unwrap(),
            split(&forty(), &spec).unwrap()
        );
        let other = SplitSpec { seed: 99, ..spec };
        assert_ne!(
            split(&forty(), &spec).unwrap(),
            split(&forty(), &other).unwrap()
        );
    }

    #[test]
    fn extreme_fraction_fails() {
        let spec = SplitSpec {
            train_fraction: 0.99,
            ..SplitSpec::default()
        };
        assert!(matches!(split(&forty(), &spec), Err(Error::Split(_))));
        let spec = SplitSpec {
            train_fraction: 1.0,
            ..SplitSpec::default()
        };
        assert!(split(&forty(), &spec).is_err());
    }

    #[test]
    fn train_scaled_to_unit_interval() {
        let t = split(&forty(), &SplitSpec::default()).unwrap();
        for j in 0..2 {
            let col: Vec<f64> = t.train().samples().iter().map(|s| s.features[j]).collect();
            assert_eq!(col.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
            assert_eq!(col.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
        }
        for s in t.test().samples() {
            assert!(s.features.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn duplicates_go_to_train() {
        let mut samples: Vec<Sample> = (0..10)
            .map(|i| Sample::new(vec![i as f64], i % 2))
            .collect();
        for i in 0..10 {
            samples.push(Sample::new(vec![i as f64], i % 2));
        }
        let d = Dataset::new("dup", 2, samples).unwrap();
        let spec = SplitSpec {
            train_fraction: 0.5,
            ..SplitSpec::default()
        };
        // every test row would duplicate a training row, so nothing is left
        match split(&d, &spec) {
            Ok(t) => assert!(t.train().is_disjoint_from(t.test())),
            Err(Error::Split(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let s = MinMaxScaler::fit(&[Sample::new(vec![3.0], 0), Sample::new(vec![3.0], 1)]);
        assert_eq!(s.transform(&[3.0]), vec![0.0]);
        assert_eq!(s.transform(&[7.0]), vec![0.0]);
    }
}
