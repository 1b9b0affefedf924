//! Literal and abstract representations, grouped by task.
//!
//! Every ingested input is kept verbatim as a literal. Inputs also feed an
//! abstract representation: the running mean of nearby same-task,
//! same-label inputs. Abstracts of one task are compacted by merging pairs
//! that sit closer than the merge threshold. Nothing written under one task
//! tag is ever read or written while ingesting under another.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::digest::{CanonicalWriter, Digest};
use crate::domain::{feature_key, ClassId, Dataset};
use crate::error::{Error, Result};
use crate::learner::{EpochLog, EpochRecord};

pub const DEFAULT_MERGE_THRESHOLD: f64 = 0.15;

/// Format version written into serialized store files.
pub const STORE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationKind {
    Literal,
    Abstract,
}

impl RepresentationKind {
    fn as_str(self) -> &'static str {
        match self {
            RepresentationKind::Literal => "literal",
            RepresentationKind::Abstract => "abstract",
        }
    }
}

/// Field order matches the serialized layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub task_tag: String,
    pub kind: RepresentationKind,
    pub label: ClassId,
    pub support: u64,
    pub vector: Vec<f64>,
}

impl Representation {
    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// (task_tag, kind, label, vector lexicographic, support).
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.task_tag
            .cmp(&other.task_tag)
            .then(self.kind.cmp(&other.kind))
            .then(self.label.cmp(&other.label))
            .then_with(|| lex_cmp(&self.vector, &other.vector))
            .then(self.support.cmp(&other.support))
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Euclidean distance scaled by `1 / sqrt(dim)`.
pub fn normalized_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq / a.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: ClassId,
    pub task_tag: String,
    pub distance: f64,
    pub kind: RepresentationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct LiteralKey {
    task_tag: String,
    label: ClassId,
    bits: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct RepresentationStore {
    merge_threshold: f64,
    literals: Vec<Representation>,
    literal_keys: HashSet<LiteralKey>,
    abstracts: Vec<Representation>,
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    version: u32,
    merge_threshold: f64,
    representations: Vec<Representation>,
}

impl Default for RepresentationStore {
    fn default() -> Self {
        Self::new(DEFAULT_MERGE_THRESHOLD).expect("default threshold is valid")
    }
}

impl RepresentationStore {
    /// A threshold of 0 disables abstraction entirely.
    pub fn new(merge_threshold: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&merge_threshold) {
            return Err(Error::contract(format!(
                "merge threshold {merge_threshold} outside [0, 1)"
            )));
        }
        Ok(Self {
            merge_threshold,
            literals: Vec::new(),
            literal_keys: HashSet::new(),
            abstracts: Vec::new(),
        })
    }

    pub fn merge_threshold(&self) -> f64 {
        self.merge_threshold
    }

    pub fn len(&self) -> usize {
        self.literals.len() + self.abstracts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn literals(&self) -> &[Representation] {
        &self.literals
    }

    pub fn abstracts(&self) -> &[Representation] {
        &self.abstracts
    }

    pub fn iter(&self) -> impl Iterator<Item = &Representation> {
        self.literals.iter().chain(&self.abstracts)
    }

    /// Stores one labelled input under `task_tag`. Returns whether anything
    /// changed; re-ingesting a known literal is a no-op.
    pub fn ingest(&mut self, features: &[f64], label: ClassId, task_tag: &str) -> Result<bool> {
        if features.is_empty() {
            return Err(Error::contract("cannot ingest an empty feature vector"));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("cannot ingest non-finite features"));
        }
        if features.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::contract("features must be normalized to [0, 1]"));
        }
        let key = LiteralKey {
            task_tag: task_tag.to_owned(),
            label,
            bits: feature_key(features),
        };
        if self.literal_keys.contains(&key) {
            return Ok(false);
        }
        self.literal_keys.insert(key);
        self.literals.push(Representation {
            task_tag: task_tag.to_owned(),
            kind: RepresentationKind::Literal,
            label,
            support: 1,
            vector: features.to_vec(),
        });

        if self.merge_threshold > 0.0 {
            self.absorb(features, label, task_tag);
        }
        Ok(true)
    }

    fn absorb(&mut self, features: &[f64], label: ClassId, task_tag: &str) {
        let mut nearest: Option<(usize, f64)> = None;
        for (i, a) in self.abstracts.iter().enumerate() {
            if a.task_tag != task_tag || a.label != label || a.dim() != features.len() {
                continue;
            }
            let d = normalized_distance(&a.vector, features);
            if d < self.merge_threshold && nearest.is_none_or(|(_, best)| d < best) {
                nearest = Some((i, d));
            }
        }
        match nearest {
            Some((i, _)) => {
                let a = &mut self.abstracts[i];
                let s = a.support as f64;
                for (v, x) in a.vector.iter_mut().zip(features) {
                    *v = (*v * s + x) / (s + 1.0);
                }
                a.support += 1;
            }
            None => self.abstracts.push(Representation {
                task_tag: task_tag.to_owned(),
                kind: RepresentationKind::Abstract,
                label,
                support: 1,
                vector: features.to_vec(),
            }),
        }
    }

    /// One greedy pass over the abstracts of `task_tag` in canonical order:
    /// each abstract merges with its nearest later partner closer than the
    /// threshold, and takes part in at most one merge. Returns whether any
    /// merge happened.
    pub fn compact_once(&mut self, task_tag: &str) -> bool {
        let (mut mine, others): (Vec<_>, Vec<_>) = std::mem::take(&mut self.abstracts)
            .into_iter()
            .partition(|a| a.task_tag == task_tag);
        mine.sort_by(Representation::canonical_cmp);

        let mut used = vec![false; mine.len()];
        let mut out = Vec::with_capacity(mine.len());
        let mut merged_any = false;
        for i in 0..mine.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut partner: Option<(usize, f64)> = None;
            for j in i + 1..mine.len() {
                if used[j] || mine[j].label != mine[i].label || mine[j].dim() != mine[i].dim() {
                    continue;
                }
                let d = normalized_distance(&mine[i].vector, &mine[j].vector);
                if d < self.merge_threshold && partner.is_none_or(|(_, best)| d < best) {
                    partner = Some((j, d));
                }
            }
            match partner {
                Some((j, _)) => {
                    used[j] = true;
                    merged_any = true;
                    let (a, b) = (&mine[i], &mine[j]);
                    let (sa, sb) = (a.support as f64, b.support as f64);
                    let vector = a
                        .vector
                        .iter()
                        .zip(&b.vector)
                        .map(|(x, y)| (x * sa + y * sb) / (sa + sb))
                        .collect();
                    out.push(Representation {
                        task_tag: a.task_tag.clone(),
                        kind: RepresentationKind::Abstract,
                        label: a.label,
                        support: a.support + b.support,
                        vector,
                    });
                }
                None => out.push(mine[i].clone()),
            }
        }
        out.sort_by(Representation::canonical_cmp);
        self.abstracts = others;
        self.abstracts.extend(out);
        merged_any
    }

    /// Repeats [`compact_once`](Self::compact_once) until nothing merges.
    /// Returns the number of passes that merged something.
    pub fn compact(&mut self, task_tag: &str) -> usize {
        let mut passes = 0;
        while self.compact_once(task_tag) {
            passes += 1;
        }
        passes
    }

    /// Each epoch ingests every sample and then compacts to a fixed point, so
    /// a second epoch over the same data changes nothing. An epoch reports
    /// `changed` when either step altered the store.
    pub fn fit(&mut self, train: &Dataset, task_tag: &str, epochs: usize) -> Result<EpochLog> {
        if epochs == 0 {
            return Err(Error::contract("at least one epoch is required"));
        }
        let mut log = EpochLog::default();
        for epoch in 1..=epochs {
            let mut changed = false;
            for s in train.samples() {
                changed |= self.ingest(&s.features, s.label, task_tag)?;
            }
            if self.merge_threshold > 0.0 {
                changed |= self.compact(task_tag) > 0;
            }
            log.records.push(EpochRecord {
                epoch,
                changed,
                train_loss: None,
                train_accuracy: None,
            });
        }
        Ok(log)
    }

    /// Nearest representation of matching dimension across all tasks.
    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        self.nearest(features, None)
    }

    /// Nearest representation of matching dimension within one task.
    pub fn predict_in(&self, features: &[f64], task_tag: &str) -> Result<Prediction> {
        self.nearest(features, Some(task_tag))
    }

    fn nearest(&self, features: &[f64], scope: Option<&str>) -> Result<Prediction> {
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("query has non-finite features"));
        }
        let mut best: Option<(f64, &Representation)> = None;
        for r in self.candidates(features.len(), scope) {
            let d = normalized_distance(&r.vector, features);
            let better = match best {
                None => true,
                Some((bd, br)) => d
                    .total_cmp(&bd)
                    .then(r.kind.cmp(&br.kind))
                    .then(r.label.cmp(&br.label))
                    .then_with(|| r.task_tag.cmp(&br.task_tag))
                    .is_lt(),
            };
            if better {
                best = Some((d, r));
            }
        }
        let (distance, r) = best.ok_or_else(|| Error::NoCompatibleKnowledge {
            dim: features.len(),
            task_tag: scope.map(str::to_owned),
        })?;
        Ok(Prediction {
            label: r.label,
            task_tag: r.task_tag.clone(),
            distance,
            kind: r.kind,
        })
    }

    /// Smallest distance to each label among comparable representations.
    pub fn label_distances(
        &self,
        features: &[f64],
        scope: Option<&str>,
        class_count: usize,
    ) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; class_count];
        for r in self.candidates(features.len(), scope) {
            if r.label < class_count {
                let d = normalized_distance(&r.vector, features);
                out[r.label] = out[r.label].min(d);
            }
        }
        out
    }

    fn candidates<'a>(
        &'a self,
        dim: usize,
        scope: Option<&'a str>,
    ) -> impl Iterator<Item = &'a Representation> + 'a {
        self.iter()
            .filter(move |r| r.dim() == dim && scope.is_none_or(|t| r.task_tag == t))
    }

    /// All representations in canonical order.
    pub fn canonical(&self) -> Vec<&Representation> {
        let mut all: Vec<&Representation> = self.iter().collect();
        all.sort_by(|a, b| a.canonical_cmp(b));
        all
    }

    pub fn fingerprint(&self) -> Digest {
        let all = self.canonical();
        let mut w = CanonicalWriter::new("representation-store/v1");
        w.u64(all.len() as u64);
        for r in all {
            w.str(&r.task_tag)
                .str(r.kind.as_str())
                .u64(r.label as u64)
                .u64(r.support)
                .f64s(&r.vector);
        }
        w.finish()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = StoreFile {
            version: STORE_FORMAT_VERSION,
            merge_threshold: self.merge_threshold,
            representations: self.canonical().into_iter().cloned().collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: StoreFile = serde_json::from_str(s)?;
        if file.version != STORE_FORMAT_VERSION {
            return Err(Error::contract(format!(
                "unsupported store format version {}",
                file.version
            )));
        }
        let mut store = Self::new(file.merge_threshold)?;
        for r in file.representations {
            if r.vector.is_empty() || r.vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::contract(
                    "representation with empty or non-finite vector",
                ));
            }
            if r.support == 0 {
                return Err(Error::contract("representation with zero support"));
            }
            match r.kind {
                RepresentationKind::Literal => {
                    if r.support != 1 {
                        return Err(Error::contract("literal representation with support != 1"));
                    }
                    let key = LiteralKey {
                        task_tag: r.task_tag.clone(),
                        label: r.label,
                        bits: feature_key(&r.vector),
                    };
                    if !store.literal_keys.insert(key) {
                        return Err(Error::contract("duplicate literal representation"));
                    }
                    store.literals.push(r);
                }
                RepresentationKind::Abstract => store.abstracts.push(r),
            }
        }
        Ok(store)
    }
}
