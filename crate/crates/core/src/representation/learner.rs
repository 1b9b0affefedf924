use crate::digest::Digest;
use crate::domain::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::learner::{EpochLog, Learner};
use crate::representation::store::RepresentationStore;

/// Temperature of the soft-min turning per-label distances into a
/// distribution. Only loss values depend on it, never predictions.
pub const SOFTMIN_TEMPERATURE: f64 = 0.05;

/// A [`RepresentationStore`] behind the [`Learner`] contract.
///
/// Training tags representations with the dataset name. With task scoping
/// on (the default), queries only consult the queried task's
/// representations; with it off, every representation of matching
/// dimension competes.
#[derive(Debug, Clone)]
pub struct RepresentationLearner {
    store: RepresentationStore,
    scoped: bool,
}

impl Default for RepresentationLearner {
    fn default() -> Self {
        Self {
            store: RepresentationStore::default(),
            scoped: true,
        }
    }
}

impl RepresentationLearner {
    pub fn new(merge_threshold: f64) -> Result<Self> {
        Ok(Self {
            store: RepresentationStore::new(merge_threshold)?,
            scoped: true,
        })
    }

    pub fn with_task_scoping(mut self, scoped: bool) -> Self {
        self.scoped = scoped;
        self
    }

    pub fn store(&self) -> &RepresentationStore {
        &self.store
    }

    pub fn merge_threshold(&self) -> f64 {
        self.store.merge_threshold()
    }

    fn scope<'a>(&self, task: &'a str) -> Option<&'a str> {
        self.scoped.then_some(task)
    }
}

impl Learner for RepresentationLearner {
    fn kind(&self) -> &str {
        "representation"
    }

    fn fit(&mut self, train: &Dataset, epochs: usize) -> Result<EpochLog> {
        self.store.fit(train, train.name(), epochs)
    }

    fn predict(&self, features: &[f64], task: &str) -> Result<ClassId> {
        let p = match self.scope(task) {
            Some(t) => self.store.predict_in(features, t)?,
            None => self.store.predict(features)?,
        };
        Ok(p.label)
    }

    fn predict_proba(&self, features: &[f64], task: &str, class_count: usize) -> Result<Vec<f64>> {
        let scope = self.scope(task);
        let d = self.store.label_distances(features, scope, class_count);
        let nearest = d.iter().copied().fold(f64::INFINITY, f64::min);
        if !nearest.is_finite() {
            return Err(Error::NoCompatibleKnowledge {
                dim: features.len(),
                task_tag: scope.map(str::to_owned),
            });
        }
        let weights: Vec<f64> = d
            .iter()
            .map(|di| (-(di - nearest) / SOFTMIN_TEMPERATURE).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / total).collect())
    }

    fn fingerprint(&self) -> Digest {
        self.store.fingerprint()
    }

    fn reset(&mut self) {
        self.store = RepresentationStore::new(self.store.merge_threshold())
            .expect("threshold was validated at construction");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Sample;

    fn set(name: &str, flip: bool) -> Dataset {
        let samples = (0..10)
            .map(|i| {
                let x = i as f64 / 10.0 + 0.05;
                Sample::new(vec![x, 0.5], usize::from((x >= 0.5) != flip))
            })
            .collect();
        Dataset::new(name, 2, samples).unwrap()
    }

    #[test]
    fn scoped_queries_ignore_other_tasks() {
        let mut l = RepresentationLearner::default();
        l.fit(&set("a", false), 1).unwrap();
        let before: Vec<_> = set("a", false)
            .samples()
            .iter()
            .map(|s| l.predict(&s.features, "a").unwrap())
            .collect();
        l.fit(&set("b", true), 1).unwrap();
        let after: Vec<_> = set("a", false)
            .samples()
            .iter()
            .map(|s| l.predict(&s.features, "a").unwrap())
            .collect();
        assert_eq!(before, after);
    }

    #[test]
    fn unscoped_queries_see_everything() {
        let mut l = RepresentationLearner::default().with_task_scoping(false);
        l.fit(&set("a", false), 1).unwrap();
        l.fit(&set("b", true), 1).unwrap();
        // exact duplicates in both tasks: literal tie goes to the lower label
        assert_eq!(l.predict(&[0.95, 0.5], "a").unwrap(), 0);
    }

    #[test]
    fn proba_argmax_agrees_with_prediction() {
        let mut l = RepresentationLearner::default();
        l.fit(&set("a", false), 1).unwrap();
        for q in [[0.1, 0.4], [0.7, 0.6], [0.33, 0.5]] {
            let p = l.predict_proba(&q, "a", 2).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(crate::loss::argmax(&p), l.predict(&q, "a").unwrap());
        }
    }

    #[test]
    fn unknown_task_has_no_knowledge() {
        let mut l = RepresentationLearner::default();
        l.fit(&set("a", false), 1).unwrap();
        assert!(matches!(
            l.predict_proba(&[0.1, 0.1], "zzz", 2),
            Err(Error::NoCompatibleKnowledge { .. })
        ));
    }
}
