//! Catastrophic forgetting and overfitting experiments comparing weighted
//! learners (logistic regression, small MLPs) against a representation
//! store that keeps every sample it has seen.

mod digest;
mod domain;
mod error;
mod eval;
mod learner;
mod loss;

pub mod data;
pub mod protocols;
pub mod representation;
pub mod weighted;

pub use digest::{CanonicalWriter, Digest};
pub use domain::{ClassId, Dataset, Sample, Task};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalReport};
pub use learner::{EpochLog, EpochRecord, Learner};
pub use loss::{
    argmax, one_hot, softmax, LossFunction, NORMALIZATION_TOLERANCE, PROBABILITY_FLOOR,
};
