use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::TrainConfig;
use super::model::{Example, Model};
use super::vocab::Vocabularies;
use super::ClassifierError;
use crate::corpus::{EmbeddingTable, Instance};
use crate::eval::score;

/// One SGD update on a single example. Returns the loss before the update.
pub fn train_step(model: &mut Model, example: &Example, learning_rate: f64) -> Result<f64, ClassifierError> {
    let f = model.layout.forward(&model.store, &example.x)?;
    let loss = f.loss(example.gold);
    if !loss.is_finite() {
        return Err(ClassifierError::NonFiniteLoss {
            id: example.id,
            value: loss,
        });
    }
    model.layout.backward(&mut model.store, &example.x, &f, example.gold);
    model.store.sgd_step(learning_rate);
    Ok(loss)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochReport {
    pub epoch: usize,
    pub mean_loss: f64,
    /// Share of examples classified correctly before their own update.
    pub train_accuracy: f64,
    pub validation_macro_f1: Option<f64>,
}

impl fmt::Display for EpochReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch {:>3}  loss {:.6}  train-acc {:.4}",
            self.epoch, self.mean_loss, self.train_accuracy
        )?;
        if let Some(v) = self.validation_macro_f1 {
            write!(f, "  val-macro-f1 {v:.4}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    pub epochs: Vec<EpochReport>,
}

impl fmt::Display for TrainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.epochs {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn accuracy(model: &Model, examples: &[Example]) -> Result<f64, ClassifierError> {
    if examples.is_empty() {
        return Ok(0.0);
    }
    let mut right = 0;
    for e in examples {
        if model.forward(&e.x)?.label() == e.gold {
            right += 1;
        }
    }
    Ok(right as f64 / examples.len() as f64)
}

pub fn macro_f1(model: &Model, examples: &[Example]) -> Result<f64, ClassifierError> {
    let mut pred = Vec::with_capacity(examples.len());
    for e in examples {
        pred.push(model.forward(&e.x)?.label());
    }
    let gold: Vec<_> = examples.iter().map(|e| e.gold).collect();
    Ok(score(&gold, &pred).expect("equal lengths").macro_f1)
}

/// Run `config.epochs` passes of per-example SGD. The visiting order is
/// reshuffled every epoch from a generator seeded by `config.seed`.
pub fn train(
    model: &mut Model,
    examples: &[Example],
    config: &TrainConfig,
    validation: Option<&[Example]>,
    progress: &mut dyn FnMut(&EpochReport),
) -> Result<TrainReport, ClassifierError> {
    config.validate()?;
    if examples.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut report = TrainReport::default();
    for epoch in 1..=config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        let mut total = 0.0;
        let mut right = 0;
        for &i in &order {
            let e = &examples[i];
            let f = model.layout.forward(&model.store, &e.x)?;
            let loss = f.loss(e.gold);
            if !loss.is_finite() {
                return Err(ClassifierError::NonFiniteLoss { id: e.id, value: loss });
            }
            if f.label() == e.gold {
                right += 1;
            }
            model.layout.backward(&mut model.store, &e.x, &f, e.gold);
            model.store.sgd_step(config.learning_rate);
            total += loss;
        }
        let entry = EpochReport {
            epoch,
            mean_loss: total / examples.len() as f64,
            train_accuracy: right as f64 / examples.len() as f64,
            validation_macro_f1: validation.map(|v| macro_f1(model, v)).transpose()?,
        };
        progress(&entry);
        report.epochs.push(entry);
    }
    Ok(report)
}

/// Build the vocabulary from `instances`, initialise a model and train it.
pub fn fit(
    instances: &[Instance],
    config: &TrainConfig,
    embeddings: Option<&EmbeddingTable>,
    validation: Option<&[Instance]>,
    progress: &mut dyn FnMut(&EpochReport),
) -> Result<(Model, TrainReport), ClassifierError> {
    config.validate()?;
    let mut model = Model::new(&config.model, Vocabularies::build(instances), config.seed, embeddings)?;
    let examples = model.examples(instances)?;
    let validation = validation.map(|v| model.examples(v)).transpose()?;
    let report = train(&mut model, &examples, config, validation.as_deref(), progress)?;
    Ok((model, report))
}

/// Split `0..n` into `k` shuffled folds. Returns `(train, held_out)` index
/// lists per fold.
pub fn k_fold_splits(n: usize, k: usize, seed: u64) -> Vec<(Vec<usize>, Vec<usize>)> {
    assert!(k >= 2, "need at least two folds");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (0..k)
        .map(|f| {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (pos, &i) in order.iter().enumerate() {
                if pos % k == f {
                    test.push(i);
                } else {
                    train.push(i);
                }
            }
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub fold_macro_f1: Vec<f64>,
}

impl CrossValidation {
    pub fn mean(&self) -> f64 {
        self.fold_macro_f1.iter().sum::<f64>() / self.fold_macro_f1.len().max(1) as f64
    }
}

/// Train on each fold's complement and score its held-out part.
pub fn cross_validate(
    instances: &[Instance],
    config: &TrainConfig,
    folds: usize,
    embeddings: Option<&EmbeddingTable>,
) -> Result<CrossValidation, ClassifierError> {
    let mut fold_macro_f1 = Vec::with_capacity(folds);
    for (train_idx, test_idx) in k_fold_splits(instances.len(), folds, config.seed) {
        let pick = |idx: &[usize]| idx.iter().map(|&i| instances[i].clone()).collect::<Vec<_>>();
        let (train_set, test_set) = (pick(&train_idx), pick(&test_idx));
        let (model, _) = fit(&train_set, config, embeddings, None, &mut |_| {})?;
        fold_macro_f1.push(macro_f1(&model, &model.examples(&test_set)?)?);
    }
    Ok(CrossValidation { fold_macro_f1 })
}
