use super::config::{ModelConfig, TrainConfig};
use super::network::{EncodedInstance, Forward, Layout};
use super::vocab::{Vocab, Vocabularies};
use super::ClassifierError;
use crate::adp::DependencyGraph;
use crate::corpus::{EmbeddingTable, Instance};
use crate::labels::Label;
use crate::numerics::{gradient_check, Dtype, GradCheckOptions, GradCheckReport, ModelFile, ParameterStore};
use crate::path::Activation;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub distribution: Vec<f64>,
    /// Pooled path representation `L`.
    pub path_repr: Vec<f64>,
}

/// An encoded instance with its gold label, ready for training.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: u64,
    pub x: EncodedInstance,
    pub gold: Label,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub vocab: Vocabularies,
    pub layout: Layout,
    pub store: ParameterStore,
}

impl Model {
    /// Register and initialise all parameters. Word rows found in
    /// `embeddings` (exact, then lowercase) are copied in; the rest keep
    /// their random initialisation.
    pub fn new(
        config: &ModelConfig,
        vocab: Vocabularies,
        seed: u64,
        embeddings: Option<&EmbeddingTable>,
    ) -> Result<Self, ClassifierError> {
        let mut store = ParameterStore::new();
        let layout = Layout::register(config, &vocab, &mut store)?;
        store.init_uniform(seed);
        if let Some(table) = embeddings {
            if table.dim() != config.dim {
                return Err(ClassifierError::Config(format!(
                    "embeddings have dimension {}, model expects {}",
                    table.dim(),
                    config.dim
                )));
            }
            let id = layout.subtree.word_embeddings;
            let words = store.value_mut(id);
            for (row, w) in vocab.words.entries().iter().enumerate() {
                let v = if row == 0 {
                    Some(table.unk())
                } else {
                    table.get(w).or_else(|| table.get(&w.to_lowercase()))
                };
                if let Some(v) = v {
                    words.row_mut(row).copy_from_slice(v);
                }
            }
        }
        Ok(Model { vocab, layout, store })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.layout.config
    }

    pub fn encode_pair(
        &self,
        graph: &DependencyGraph,
        e1: usize,
        e2: usize,
    ) -> Result<EncodedInstance, ClassifierError> {
        let adp = graph.augmented_path(e1, e2)?;
        Ok(self.layout.encode(&self.vocab, graph, &adp, e1, e2))
    }

    pub fn encode(&self, inst: &Instance) -> Result<EncodedInstance, ClassifierError> {
        self.encode_pair(&inst.graph, inst.e1.head, inst.e2.head)
            .map_err(|e| e.for_instance(inst.id))
    }

    /// Encode labelled instances; an unlabelled one is an error.
    pub fn examples(&self, instances: &[Instance]) -> Result<Vec<Example>, ClassifierError> {
        instances
            .iter()
            .map(|inst| {
                Ok(Example {
                    id: inst.id,
                    x: self.encode(inst)?,
                    gold: inst.gold.ok_or(ClassifierError::MissingLabel(inst.id))?,
                })
            })
            .collect()
    }

    pub fn forward(&self, x: &EncodedInstance) -> Result<Forward, ClassifierError> {
        self.layout.forward(&self.store, x)
    }

    pub fn predict_encoded(&self, x: &EncodedInstance) -> Result<Prediction, ClassifierError> {
        let f = self.forward(x)?;
        Ok(Prediction {
            label: f.label(),
            path_repr: f.path_repr().to_vec(),
            distribution: f.y,
        })
    }

    pub fn predict(&self, inst: &Instance) -> Result<Prediction, ClassifierError> {
        self.predict_encoded(&self.encode(inst)?)
            .map_err(|e| e.for_instance(inst.id))
    }

    /// Summed loss over `examples`.
    pub fn loss(&self, examples: &[Example]) -> Result<f64, ClassifierError> {
        examples
            .iter()
            .try_fold(0.0, |acc, e| Ok(acc + self.forward(&e.x)?.loss(e.gold)))
    }

    /// Summed loss; gradients accumulate into the store.
    pub fn loss_and_grad(&mut self, examples: &[Example]) -> Result<f64, ClassifierError> {
        let mut total = 0.0;
        for e in examples {
            let f = self.layout.forward(&self.store, &e.x)?;
            total += f.loss(e.gold);
            self.layout.backward(&mut self.store, &e.x, &f, e.gold);
        }
        Ok(total)
    }

    /// Finite-difference check, one example at a time so the rounding noise
    /// stays at the scale of a single loss. The report keeps the worst error
    /// per tensor.
    pub fn gradient_check(
        &mut self,
        examples: &[Example],
        options: &GradCheckOptions,
    ) -> Result<GradCheckReport, ClassifierError> {
        for e in examples {
            self.forward(&e.x)?;
        }
        let layout = self.layout.clone();
        let mut report = GradCheckReport::default();
        for e in examples {
            let loss = |store: &ParameterStore| layout.forward(store, &e.x).expect("checked above").loss(e.gold);
            let loss_and_grad = |store: &mut ParameterStore| {
                let f = layout.forward(store, &e.x).expect("checked above");
                layout.backward(store, &e.x, &f, e.gold);
                f.loss(e.gold)
            };
            report.merge(gradient_check(&mut self.store, loss, loss_and_grad, options)?);
        }
        Ok(report)
    }

    pub fn to_model_file(&self, train: Option<&TrainConfig>) -> ModelFile {
        let c = self.config();
        let mut meta = vec![
            ("dim".to_string(), c.dim.to_string()),
            ("dim_c".into(), c.dim_c.to_string()),
            ("hidden".into(), c.hidden.to_string()),
            ("window".into(), c.window.to_string()),
            ("dim_lex".into(), c.dim_lex.to_string()),
            ("subtrees".into(), c.use_subtrees.to_string()),
            ("ner".into(), c.use_ner.to_string()),
            ("wordnet".into(), c.use_wordnet.to_string()),
            ("activation".into(), c.activation.name().to_string()),
        ];
        if let Some(t) = train {
            meta.push(("train.learning_rate".into(), t.learning_rate.to_string()));
            meta.push(("train.epochs".into(), t.epochs.to_string()));
            meta.push(("train.seed".into(), t.seed.to_string()));
            meta.push(("train.shuffle".into(), t.shuffle.to_string()));
        }
        ModelFile {
            meta,
            vocabs: self
                .vocab
                .named()
                .iter()
                .map(|(n, v)| (n.to_string(), v.entries().to_vec()))
                .collect(),
            tensors: self
                .store
                .iter()
                .map(|(_, p)| (p.name().to_string(), p.value().clone()))
                .collect(),
        }
    }

    pub fn to_bytes(&self, train: Option<&TrainConfig>) -> Vec<u8> {
        self.to_model_file(train).to_bytes(Dtype::F64)
    }

    pub fn from_model_file(file: &ModelFile) -> Result<Self, ClassifierError> {
        let bad = |m: String| ClassifierError::Model(m);
        let meta = |k: &str| file.meta(k).ok_or_else(|| bad(format!("missing meta key {k:?}")));
        let num = |k: &str| -> Result<usize, ClassifierError> {
            meta(k)?.parse().map_err(|_| bad(format!("bad value for {k:?}")))
        };
        let flag = |k: &str| -> Result<bool, ClassifierError> {
            meta(k)?.parse().map_err(|_| bad(format!("bad value for {k:?}")))
        };
        let config = ModelConfig {
            dim: num("dim")?,
            dim_c: num("dim_c")?,
            hidden: num("hidden")?,
            window: num("window")?,
            dim_lex: num("dim_lex")?,
            use_subtrees: flag("subtrees")?,
            use_ner: flag("ner")?,
            use_wordnet: flag("wordnet")?,
            activation: Activation::parse(meta("activation")?).ok_or_else(|| bad("unknown activation".into()))?,
        };
        let vocab_of = |n: &str| {
            file.vocab(n)
                .map(|e| Vocab::from_entries(e.to_vec()))
                .ok_or_else(|| bad(format!("missing vocabulary {n:?}")))
        };
        let vocab = Vocabularies {
            words: vocab_of("words")?,
            relations: vocab_of("relations")?,
            compose: vocab_of("compose")?,
            ner: vocab_of("ner")?,
            wordnet: vocab_of("wordnet")?,
        };
        let mut store = ParameterStore::new();
        let layout = Layout::register(&config, &vocab, &mut store)?;
        let ids: Vec<_> = store.iter().map(|(id, p)| (id, p.name().to_string())).collect();
        if ids.len() != file.tensors.len() {
            return Err(bad(format!(
                "file has {} tensors, configuration needs {}",
                file.tensors.len(),
                ids.len()
            )));
        }
        for (id, name) in ids {
            let t = file
                .tensor(&name)
                .ok_or_else(|| bad(format!("missing tensor {name:?}")))?;
            if t.shape() != store.value(id).shape() {
                return Err(bad(format!(
                    "tensor {name:?} has shape {}, expected {}",
                    t.shape(),
                    store.value(id).shape()
                )));
            }
            *store.value_mut(id) = t.clone();
        }
        store.validate()?;
        Ok(Model { vocab, layout, store })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ClassifierError> {
        Self::from_model_file(&ModelFile::from_bytes(bytes)?)
    }
}
