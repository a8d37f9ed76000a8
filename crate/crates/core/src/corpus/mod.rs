//! Reading and writing corpora: SemEval-2010 task 8 raw files, the
//! `DEPNN-INST` parsed-instance format, CoNLL parses and word embeddings.

mod convert;
mod embeddings;
mod instances;
mod semeval;
mod stats;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::adp::{AdpError, AugmentedDependencyPath, DependencyGraph};
use crate::labels::Label;

pub use convert::{align_instances, parse_conll, AlignmentFailure, ParsedSentence};
pub use embeddings::{load_embeddings, parse_embeddings, EmbeddingTable};
pub use instances::{parse_instances, read_parsed_instances, write_instances, INSTANCE_HEADER};
pub use semeval::{parse_semeval_raw, read_semeval_raw, RawInstance};
pub use stats::{dataset_stats, DatasetStats};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("instance {id}: {source}")]
    TreeViolation {
        id: u64,
        #[source]
        source: AdpError,
    },
    #[error("instance {id}: {message}")]
    SpanError { id: u64, message: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
}

impl CorpusError {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        CorpusError::Format {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Inclusive token span of an entity and the head word inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntityMention {
    pub start: usize,
    pub end: usize,
    pub head: usize,
}

impl EntityMention {
    pub fn locate(graph: &DependencyGraph, start: usize, end: usize) -> Result<Self, AdpError> {
        let head = graph.find_entity_head(start, end)?;
        Ok(EntityMention { start, end, head })
    }

    fn overlaps(&self, other: &EntityMention) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// A sentence with two marked entities and (optionally) its gold label.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: u64,
    pub graph: DependencyGraph,
    pub e1: EntityMention,
    pub e2: EntityMention,
    pub gold: Option<Label>,
}

impl Instance {
    pub fn new(
        id: u64,
        graph: DependencyGraph,
        e1: (usize, usize),
        e2: (usize, usize),
        gold: Option<Label>,
    ) -> Result<Self, CorpusError> {
        let span_err = |source: AdpError| CorpusError::SpanError {
            id,
            message: source.to_string(),
        };
        let e1 = EntityMention::locate(&graph, e1.0, e1.1).map_err(span_err)?;
        let e2 = EntityMention::locate(&graph, e2.0, e2.1).map_err(span_err)?;
        if e1.overlaps(&e2) {
            return Err(CorpusError::SpanError {
                id,
                message: format!(
                    "entity spans [{}, {}] and [{}, {}] overlap",
                    e1.start, e1.end, e2.start, e2.end
                ),
            });
        }
        Ok(Instance {
            id,
            graph,
            e1,
            e2,
            gold,
        })
    }

    /// Augmented dependency path from the head of `e1` to the head of `e2`.
    pub fn adp(&self) -> Result<AugmentedDependencyPath, AdpError> {
        self.graph.augmented_path(self.e1.head, self.e2.head)
    }
}
