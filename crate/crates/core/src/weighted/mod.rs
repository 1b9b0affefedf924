//! Weighted mappings trained by minimising an explicit loss.

mod gradcheck;
mod learner;
mod linear;
mod network;
mod sgd;

pub use gradcheck::{gradient_check, GRADIENT_CHECK_STEP};
pub use learner::{PaddingAdapter, WeightedLearner};
pub use linear::{GdConfig, GdOutcome, ScalarLinearModel};
pub use network::{Activation, Architecture, Dense, Network, MODEL_FORMAT_VERSION};
pub use sgd::{dataset_loss, train, train_with_rng, SgdConfig};
