//! Browser demo. Each exported function takes plain strings and numbers and
//! returns a JSON string; failures come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use depnn::classifier::{fit, ModelConfig, TrainConfig};
use depnn::corpus::{parse_instances, INSTANCE_HEADER};
use depnn::eval::score;
use depnn::labels::{Label, RelationType};
use depnn::path::Activation;
use depnn::synthetic;

#[derive(Debug, Serialize, PartialEq)]
pub struct AdpView {
    pub id: u64,
    pub gold: Option<String>,
    pub path: String,
    pub words: Vec<String>,
    pub relations: Vec<String>,
    /// Forms of the tokens attached below each path word.
    pub subtrees: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct EpochView {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct TrainingView {
    pub system: String,
    pub epochs: Vec<EpochView>,
    pub heldout_macro_f1: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct TypeRow {
    pub relation: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct ScoreView {
    pub macro_f1: f64,
    pub accuracy: f64,
    pub total: usize,
    pub types: Vec<TypeRow>,
}

/// Path, relations and subtrees of one instance record (header optional).
pub fn adp_view(record: &str) -> Result<AdpView, String> {
    let text = if record.trim_start().starts_with(INSTANCE_HEADER) {
        record.to_string()
    } else {
        format!("{INSTANCE_HEADER}\n{record}\n")
    };
    let instances = parse_instances(&text).map_err(|e| e.to_string())?;
    let [inst] = instances.as_slice() else {
        return Err(format!("expected one record, found {}", instances.len()));
    };
    let adp = inst.adp().map_err(|e| e.to_string())?;
    let form = |t: usize| inst.graph.tokens()[t - 1].form.clone();
    Ok(AdpView {
        id: inst.id,
        gold: inst.gold.map(|l| l.to_string()),
        path: adp.path.render(&inst.graph),
        words: adp.words().iter().map(|&w| form(w)).collect(),
        relations: adp.path.relations.iter().map(|r| r.to_string()).collect(),
        subtrees: (0..adp.words().len())
            .map(|i| adp.subtree_tokens(i).into_iter().map(form).collect())
            .collect(),
    })
}

/// Train a small model on a generated corpus and score it on a second one.
pub fn training_view(count: usize, epochs: usize, seed: u64, subtrees: bool) -> Result<TrainingView, String> {
    if count == 0 || count > 2000 {
        return Err("count must be between 1 and 2000".into());
    }
    if epochs > 200 {
        return Err("at most 200 epochs".into());
    }
    let config = TrainConfig {
        model: ModelConfig {
            dim: 10,
            dim_c: 6,
            hidden: 24,
            window: 5,
            dim_lex: 4,
            use_subtrees: subtrees,
            use_ner: false,
            use_wordnet: false,
            activation: Activation::Tanh,
        },
        learning_rate: 0.05,
        epochs,
        seed,
        shuffle: true,
    };
    let train = synthetic::separable_corpus(count, seed);
    let heldout = synthetic::separable_corpus(count.max(19), seed.wrapping_add(1));
    let mut views = Vec::with_capacity(epochs);
    let (model, _) = fit(&train, &config, None, None, &mut |e| {
        views.push(EpochView {
            epoch: e.epoch,
            loss: e.mean_loss,
            accuracy: e.train_accuracy,
        })
    })
    .map_err(|e| e.to_string())?;
    let gold: Vec<Label> = heldout.iter().filter_map(|i| i.gold).collect();
    let pred = heldout
        .iter()
        .map(|i| model.predict(i).map(|p| p.label))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(TrainingView {
        system: config.model.system_name(),
        epochs: views,
        heldout_macro_f1: score(&gold, &pred).map_err(|e| e.to_string())?.macro_f1,
    })
}

fn parse_labels(text: &str) -> Result<Vec<Label>, String> {
    text.lines()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            // Accept bare labels or `id<TAB>label` lines.
            let label = s.split_whitespace().last().unwrap_or(s);
            label.parse().map_err(|_| format!("unknown label {label:?}"))
        })
        .collect()
}

/// Score two label lists given one label per line.
pub fn score_view(gold: &str, pred: &str) -> Result<ScoreView, String> {
    let r = score(&parse_labels(gold)?, &parse_labels(pred)?).map_err(|e| e.to_string())?;
    Ok(ScoreView {
        macro_f1: r.macro_f1,
        accuracy: r.accuracy,
        total: r.total,
        types: RelationType::all()
            .map(|t| {
                let s = r.type_score(t);
                TypeRow {
                    relation: t.name().to_string(),
                    precision: s.precision,
                    recall: s.recall,
                    f1: s.f1,
                }
            })
            .collect(),
    })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

#[wasm_bindgen]
pub fn adp_from_record(record: &str) -> String {
    to_json(adp_view(record))
}

#[wasm_bindgen]
pub fn train_synthetic(count: u32, epochs: u32, seed: u32, subtrees: bool) -> String {
    to_json(training_view(count as usize, epochs as usize, seed as u64, subtrees))
}

#[wasm_bindgen]
pub fn score_labels(gold: &str, pred: &str) -> String {
    to_json(score_view(gold, pred))
}
