//! World-modelling learner built from stored representations.

mod learner;
mod store;

pub use learner::{RepresentationLearner, SOFTMIN_TEMPERATURE};
pub use store::{
    normalized_distance, Prediction, Representation, RepresentationKind, RepresentationStore,
    DEFAULT_MERGE_THRESHOLD, STORE_FORMAT_VERSION,
};
