//! The full relation classifier: subtree and path encoders, lexical
//! features, a softmax output layer and SGD training.

mod config;
mod model;
mod network;
mod train;
mod vocab;

use thiserror::Error;

use crate::adp::AdpError;
use crate::numerics::NumericsError;
use crate::path::PathError;

pub use config::{ModelConfig, Preset, TrainConfig};
pub use model::{Example, Model, Prediction};
pub use network::{cross_entropy, EncodedInstance, Forward, Layout, MIN_PROBABILITY};
pub use train::{
    accuracy, cross_validate, fit, k_fold_splits, macro_f1, train, train_step, CrossValidation, EpochReport,
    TrainReport,
};
pub use vocab::{Vocab, Vocabularies, DEFAULT_COMPOSE, REL_END, REL_START, UNK};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Adp(#[from] AdpError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("model: {0}")]
    Model(String),
    #[error("instance {0} has no gold label")]
    MissingLabel(u64),
    #[error("non-finite loss {value} on instance {id}")]
    NonFiniteLoss { id: u64, value: f64 },
    #[error("no training instances")]
    EmptyDataset,
    #[error("instance {id}: {source}")]
    Instance {
        id: u64,
        #[source]
        source: Box<ClassifierError>,
    },
}

impl ClassifierError {
    pub(crate) fn for_instance(self, id: u64) -> Self {
        match self {
            e @ (ClassifierError::Instance { .. }
            | ClassifierError::MissingLabel(_)
            | ClassifierError::NonFiniteLoss { .. }) => e,
            e => ClassifierError::Instance {
                id,
                source: Box::new(e),
            },
        }
    }

    /// True for failures of the numerics rather than of the input data.
    pub fn is_numeric(&self) -> bool {
        match self {
            ClassifierError::NonFiniteLoss { .. } => true,
            ClassifierError::Numerics(e) => !matches!(e, NumericsError::Format(_)),
            ClassifierError::Instance { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
