//! Parameter layout and the forward/backward pass of the full network.

use super::config::ModelConfig;
use super::vocab::{Vocabularies, REL_END, REL_START};
use super::ClassifierError;
use crate::adp::{AugmentedDependencyPath, DependencyGraph};
use crate::labels::{Label, NUM_LABELS};
use crate::numerics::{axpy, gemv_acc, gemv_t_acc, outer_acc, softmax, ParamId, ParamKind, ParameterStore, Shape};
use crate::path::{build_windows, conv_backward, conv_forward, window_input_dim, ConvolutionOutput, PathParams};
use crate::subtree::{encode, encode_backward, SubtreeEncoding, SubtreeParams, WordTree};

/// Probabilities below this are clamped before taking the log.
pub const MIN_PROBABILITY: f64 = 1e-300;

/// Where each named tensor lives in the store.
#[derive(Debug, Clone)]
pub struct Layout {
    pub config: ModelConfig,
    pub subtree: SubtreeParams,
    pub path: PathParams,
    /// One composition matrix per entry of the compose vocabulary; empty
    /// when subtrees are off.
    pub compose: Vec<ParamId>,
    pub ner: Option<ParamId>,
    pub wordnet: Option<ParamId>,
    pub output: ParamId,
}

impl Layout {
    /// Register every tensor for `config` and `vocab` in a fixed order.
    pub fn register(
        config: &ModelConfig,
        vocab: &Vocabularies,
        store: &mut ParameterStore,
    ) -> Result<Self, ClassifierError> {
        config.validate()?;
        let (dim, dim_c) = (config.dim, config.dim_c);
        let words = store.register("words", Shape::Matrix(vocab.words.len(), dim), ParamKind::Embedding)?;
        let relations = store.register(
            "relations",
            Shape::Matrix(vocab.relations.len(), dim),
            ParamKind::Embedding,
        )?;
        let leaf = store.register("subtree.leaf", Shape::Vector(dim_c), ParamKind::Bias)?;
        let bias = store.register("subtree.bias", Shape::Vector(dim_c), ParamKind::Bias)?;
        let compose = if config.use_subtrees {
            vocab
                .compose
                .entries()
                .iter()
                .map(|label| {
                    store.register(
                        format!("compose.{label}"),
                        Shape::Matrix(dim_c, dim + dim_c),
                        ParamKind::Weight,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            Vec::new()
        };
        let pad = store.register("path.pad", Shape::Vector(dim + dim_c), ParamKind::Embedding)?;
        let filter = store.register(
            "path.filter",
            Shape::Matrix(config.hidden, window_input_dim(dim, dim_c, config.window)),
            ParamKind::Weight,
        )?;
        let filter_bias = store.register("path.bias", Shape::Vector(config.hidden), ParamKind::Bias)?;
        let ner = config
            .use_ner
            .then(|| {
                store.register(
                    "lex.ner",
                    Shape::Matrix(vocab.ner.len(), config.dim_lex),
                    ParamKind::Embedding,
                )
            })
            .transpose()?;
        let wordnet = config
            .use_wordnet
            .then(|| {
                store.register(
                    "lex.wordnet",
                    Shape::Matrix(vocab.wordnet.len(), config.dim_lex),
                    ParamKind::Embedding,
                )
            })
            .transpose()?;
        let output = store.register(
            "output",
            Shape::Matrix(NUM_LABELS, config.hidden + config.lex_width()),
            ParamKind::Weight,
        )?;
        Ok(Layout {
            config: config.clone(),
            subtree: SubtreeParams {
                word_embeddings: words,
                bias,
                leaf,
                dim,
                dim_c,
            },
            path: PathParams {
                relation_embeddings: relations,
                pad,
                filter,
                filter_bias,
                start_row: vocab.relations.row(REL_START),
                end_row: vocab.relations.row(REL_END),
                dim,
                dim_c,
                window: config.window,
                activation: config.activation,
            },
            compose,
            ner,
            wordnet,
            output,
        })
    }

    /// Turn an ADP into parameter rows. Unknown words, relations and tags
    /// fall back to row 0; unknown arc labels to the default composition.
    pub fn encode(
        &self,
        vocab: &Vocabularies,
        graph: &DependencyGraph,
        adp: &AugmentedDependencyPath,
        e1: usize,
        e2: usize,
    ) -> EncodedInstance {
        let word_row = |t: usize| vocab.words.word_row(&graph.tokens()[t - 1].form);
        let trees = adp
            .words()
            .iter()
            .zip(&adp.subtrees)
            .map(|(&w, arcs)| {
                if self.config.use_subtrees {
                    WordTree::from_arcs(w, arcs, word_row, |label| self.compose[vocab.compose.row(label)])
                } else {
                    WordTree::leaf(word_row(w))
                }
            })
            .collect();
        let relations = adp
            .path
            .relations
            .iter()
            .map(|r| vocab.relations.row(&r.key()))
            .collect();
        let tag = |e: usize, f: fn(&crate::adp::Token) -> Option<&String>, v: &super::vocab::Vocab| {
            graph.token(e).and_then(f).map_or(0, |s| v.row(s))
        };
        EncodedInstance {
            trees,
            relations,
            ner: [
                tag(e1, |t| t.ner_tag.as_ref(), &vocab.ner),
                tag(e2, |t| t.ner_tag.as_ref(), &vocab.ner),
            ],
            wordnet: [
                tag(e1, |t| t.wn_hypernym.as_ref(), &vocab.wordnet),
                tag(e2, |t| t.wn_hypernym.as_ref(), &vocab.wordnet),
            ],
        }
    }

    pub fn forward(&self, store: &ParameterStore, x: &EncodedInstance) -> Result<Forward, ClassifierError> {
        let encodings: Vec<SubtreeEncoding> = x.trees.iter().map(|t| encode(&self.subtree, store, t)).collect();
        let reps: Vec<Vec<f64>> = encodings.iter().map(|e| e.root().to_vec()).collect();
        let windows = build_windows(reps.len(), self.config.window)?;
        let conv = conv_forward(&self.path, store, &windows, &reps, &x.relations)?;

        let mut m = conv.pooled.clone();
        if let Some(ner) = self.ner {
            m.extend_from_slice(store.row(ner, x.ner[0]));
            m.extend_from_slice(store.row(ner, x.ner[1]));
        }
        if let Some(wn) = self.wordnet {
            m.extend_from_slice(store.row(wn, x.wordnet[0]));
            m.extend_from_slice(store.row(wn, x.wordnet[1]));
        }
        let mut logits = vec![0.0; NUM_LABELS];
        gemv_acc(&mut logits, store.value(self.output).data(), &m);
        let y = softmax(&logits);
        Ok(Forward { encodings, conv, m, y })
    }

    /// Accumulate the gradient of `−ln y[gold]` into the store.
    pub fn backward(&self, store: &mut ParameterStore, x: &EncodedInstance, f: &Forward, gold: Label) {
        let mut dlogits = f.y.clone();
        dlogits[gold.index()] -= 1.0;

        let mut dm = vec![0.0; f.m.len()];
        gemv_t_acc(&mut dm, store.value(self.output).data(), &dlogits);
        outer_acc(store.grad_mut(self.output), &dlogits, &f.m);

        let hidden = self.config.hidden;
        let lex = self.config.dim_lex;
        let mut offset = hidden;
        for (id, rows) in [(self.ner, x.ner), (self.wordnet, x.wordnet)] {
            if let Some(id) = id {
                for r in rows {
                    axpy(store.grad_row_mut(id, r), 1.0, &dm[offset..offset + lex]);
                    offset += lex;
                }
            }
        }

        let windows = build_windows(x.trees.len(), self.config.window).expect("windows were built in the forward pass");
        let word_grads = conv_backward(&self.path, store, &windows, &x.relations, &f.conv, &dm[..hidden]);
        for ((tree, enc), g) in x.trees.iter().zip(&f.encodings).zip(&word_grads) {
            encode_backward(&self.subtree, store, tree, enc, g);
        }
    }
}

/// An instance reduced to parameter rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedInstance {
    pub trees: Vec<WordTree>,
    pub relations: Vec<usize>,
    pub ner: [usize; 2],
    pub wordnet: [usize; 2],
}

/// Forward-pass cache.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub encodings: Vec<SubtreeEncoding>,
    pub conv: ConvolutionOutput,
    /// `M = [L, lexical features]`.
    pub m: Vec<f64>,
    pub y: Vec<f64>,
}

impl Forward {
    pub fn path_repr(&self) -> &[f64] {
        &self.conv.pooled
    }

    pub fn loss(&self, gold: Label) -> f64 {
        cross_entropy(&self.y, gold)
    }

    /// Highest-probability label; ties go to the lower index.
    pub fn label(&self) -> Label {
        let mut best = 0;
        for (i, &p) in self.y.iter().enumerate() {
            if p > self.y[best] {
                best = i;
            }
        }
        Label::from_index(best).expect("distribution has one entry per label")
    }
}

/// `-ln max(y_gold, MIN_PROBABILITY)`. A NaN probability stays NaN so
/// diverged parameters surface as a non-finite loss.
pub fn cross_entropy(y: &[f64], gold: Label) -> f64 {
    let p = y[gold.index()];
    if p.is_nan() {
        return f64::NAN;
    }
    -p.max(MIN_PROBABILITY).ln()
}
