use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::digest::{CanonicalWriter, Digest};
use crate::domain::{ClassId, Dataset, Sample};
use crate::error::{Error, Result};
use crate::learner::{EpochLog, Learner};
use crate::loss::LossFunction;
use crate::weighted::network::{Architecture, Network};
use crate::weighted::sgd::{train_with_rng, SgdConfig};

/// A softmax network behind the [`Learner`] contract.
///
/// The network is shaped by the first dataset it sees and keeps that shape;
/// later datasets of another dimension are rejected.
#[derive(Debug, Clone)]
pub struct WeightedLearner {
    architecture: Architecture,
    cfg: SgdConfig,
    model: Option<Network>,
    rng: ChaCha8Rng,
}

impl WeightedLearner {
    pub fn new(architecture: Architecture, cfg: SgdConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Self {
            architecture,
            cfg,
            model: None,
            rng,
        }
    }

    pub fn logistic(cfg: SgdConfig) -> Self {
        Self::new(Architecture::Logistic, cfg)
    }

    pub fn mlp(cfg: SgdConfig) -> Self {
        Self::new(Architecture::default_mlp(), cfg)
    }

    pub fn model(&self) -> Option<&Network> {
        self.model.as_ref()
    }

    pub fn config(&self) -> &SgdConfig {
        &self.cfg
    }

    fn fitted(&self) -> Result<&Network> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::contract("weighted learner used before fit"))
    }
}

impl Learner for WeightedLearner {
    fn kind(&self) -> &str {
        self.architecture.name()
    }

    fn fit(&mut self, train: &Dataset, epochs: usize) -> Result<EpochLog> {
        if epochs == 0 {
            return Err(Error::contract("at least one epoch is required"));
        }
        if self.model.is_none() {
            self.model = Some(Network::new(
                self.architecture.clone(),
                train.feature_dim(),
                train.class_count(),
                &mut self.rng,
            ));
        }
        let cfg = SgdConfig {
            epochs,
            batch_size: self.cfg.batch_size.min(train.len()),
            ..self.cfg.clone()
        };
        let model = self.model.as_mut().expect("initialised above");
        train_with_rng(
            model,
            train,
            LossFunction::CrossEntropy,
            &cfg,
            &mut self.rng,
        )
    }

    fn predict(&self, features: &[f64], _task: &str) -> Result<ClassId> {
        self.fitted()?.predict(features)
    }

    fn predict_proba(&self, features: &[f64], _task: &str, class_count: usize) -> Result<Vec<f64>> {
        let model = self.fitted()?;
        if model.class_count() != class_count {
            return Err(Error::IncompatibleClasses {
                expected: model.class_count(),
                found: class_count,
            });
        }
        model.forward(features)
    }

    fn fingerprint(&self) -> Digest {
        match &self.model {
            Some(m) => m.fingerprint(),
            None => CanonicalWriter::new("weighted-network/unfitted").finish(),
        }
    }

    fn reset(&mut self) {
        self.model = None;
        self.rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
    }
}

/// Zero-pads every input up to a fixed width so one network can meet tasks
/// of different dimension. Padding changes the problem the network sees.
#[derive(Debug, Clone)]
pub struct PaddingAdapter<L> {
    inner: L,
    width: usize,
    kind: String,
}

impl<L: Learner> PaddingAdapter<L> {
    pub fn new(inner: L, width: usize) -> Self {
        let kind = format!("{}+pad{width}", inner.kind());
        Self { inner, width, kind }
    }

    pub fn inner(&self) -> &L {
        &self.inner
    }

    fn pad(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() > self.width {
            return Err(Error::IncompatibleInput {
                expected: self.width,
                found: features.len(),
            });
        }
        let mut v = features.to_vec();
        v.resize(self.width, 0.0);
        Ok(v)
    }

    fn pad_dataset(&self, data: &Dataset) -> Result<Dataset> {
        let samples = data
            .samples()
            .iter()
            .map(|s| Ok(Sample::new(self.pad(&s.features)?, s.label)))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(data.name(), data.class_count(), samples)
    }
}

impl<L: Learner> Learner for PaddingAdapter<L> {
    fn kind(&self) -> &str {
        &self.kind
    }

    fn fit(&mut self, train: &Dataset, epochs: usize) -> Result<EpochLog> {
        let padded = self.pad_dataset(train)?;
        self.inner.fit(&padded, epochs)
    }

    fn predict(&self, features: &[f64], task: &str) -> Result<ClassId> {
        self.inner.predict(&self.pad(features)?, task)
    }

    fn predict_proba(&self, features: &[f64], task: &str, class_count: usize) -> Result<Vec<f64>> {
        self.inner
            .predict_proba(&self.pad(features)?, task, class_count)
    }

    fn fingerprint(&self) -> Digest {
        self.inner.fingerprint()
    }

    fn reset(&mut self) {
        self.inner.reset()
    }
}
