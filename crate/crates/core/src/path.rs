//! Convolution over the alternating word/relation sequence of the shortest
//! path, followed by max-over-time pooling.
//!
//! Windows are centred on path words and step two positions at a time, so
//! every window holds the same number of word slots. Slots that fall before
//! `r_s` or after `r_e` take the learned pad vector (word slots) or the
//! nearer sentinel (relation slots).

use thiserror::Error;

use crate::numerics::{axpy, gemv_acc, gemv_t_acc, outer_acc, ParamId, ParameterStore};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("window size must be odd and at least 3, got {0}")]
    InvalidWindowSize(usize),
    #[error("path has no words")]
    EmptyPath,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation's output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tanh" => Some(Activation::Tanh),
            "identity" | "none" => Some(Activation::Identity),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationSlot {
    Start,
    /// Relation between path words `i` and `i + 1`.
    Inner(usize),
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Word(usize),
    PadWord,
    Relation(RelationSlot),
}

impl Slot {
    pub fn is_word(self) -> bool {
        matches!(self, Slot::Word(_) | Slot::PadWord)
    }
}

pub type Window = Vec<Slot>;

/// Word slots in a window of size `k`.
pub fn words_per_window(k: usize) -> usize {
    let half = (k - 1) / 2;
    2 * (half / 2) + 1
}

/// Width of a concatenated window: `dim·k + dim_c·n_w`.
pub fn window_input_dim(dim: usize, dim_c: usize, k: usize) -> usize {
    dim * k + dim_c * words_per_window(k)
}

fn check_window(k: usize) -> Result<(), PathError> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(PathError::InvalidWindowSize(k));
    }
    Ok(())
}

/// One window per path word over `[r_s, w_1, r_1, …, w_m, r_e]`.
pub fn build_windows(num_words: usize, k: usize) -> Result<Vec<Window>, PathError> {
    check_window(k)?;
    if num_words == 0 {
        return Err(PathError::EmptyPath);
    }
    let half = ((k - 1) / 2) as isize;
    let last = 2 * num_words as isize;
    Ok((0..num_words)
        .map(|i| {
            let centre = 2 * i as isize + 1;
            (centre - half..=centre + half)
                .map(|pos| {
                    let word_slot = pos.rem_euclid(2) == 1;
                    match (word_slot, pos) {
                        (true, p) if p < 0 || p > last => Slot::PadWord,
                        (true, p) => Slot::Word((p as usize - 1) / 2),
                        (false, p) if p <= 0 => Slot::Relation(RelationSlot::Start),
                        (false, p) if p >= last => Slot::Relation(RelationSlot::End),
                        (false, p) => Slot::Relation(RelationSlot::Inner(p as usize / 2 - 1)),
                    }
                })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct PathParams {
    pub relation_embeddings: ParamId,
    pub pad: ParamId,
    pub filter: ParamId,
    pub filter_bias: ParamId,
    pub start_row: usize,
    pub end_row: usize,
    pub dim: usize,
    pub dim_c: usize,
    pub window: usize,
    pub activation: Activation,
}

impl PathParams {
    fn relation_row(&self, slot: RelationSlot, relations: &[usize]) -> usize {
        match slot {
            RelationSlot::Start => self.start_row,
            RelationSlot::End => self.end_row,
            RelationSlot::Inner(i) => relations[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionOutput {
    /// Concatenated window inputs `X_i`.
    pub inputs: Vec<Vec<f64>>,
    /// `L_i` per window.
    pub feature_map: Vec<Vec<f64>>,
    /// `L`, elementwise max over windows.
    pub pooled: Vec<f64>,
    /// Winning window per output coordinate.
    pub argmax: Vec<usize>,
}

/// Elementwise max over windows; ties go to the lowest window index.
pub fn max_pool(feature_map: &[Vec<f64>]) -> (Vec<f64>, Vec<usize>) {
    let mut pooled = feature_map[0].clone();
    let mut argmax = vec![0; pooled.len()];
    for (i, row) in feature_map.iter().enumerate().skip(1) {
        for (j, &v) in row.iter().enumerate() {
            if v > pooled[j] {
                pooled[j] = v;
                argmax[j] = i;
            }
        }
    }
    (pooled, argmax)
}

/// `word_reps[i]` is `p` for path word `i`; `relations[i]` is the
/// relation-embedding row between words `i` and `i + 1`.
pub fn conv_forward(
    params: &PathParams,
    store: &ParameterStore,
    windows: &[Window],
    word_reps: &[Vec<f64>],
    relations: &[usize],
) -> Result<ConvolutionOutput, PathError> {
    if windows.is_empty() {
        return Err(PathError::EmptyPath);
    }
    let filter = store.value(params.filter);
    let width = window_input_dim(params.dim, params.dim_c, params.window);
    if filter.shape().cols() != width {
        return Err(PathError::ShapeMismatch(format!(
            "filter has {} columns, windows need {width}",
            filter.shape().cols()
        )));
    }
    let bias = store.value(params.filter_bias).data();

    let mut inputs = Vec::with_capacity(windows.len());
    let mut feature_map = Vec::with_capacity(windows.len());
    for window in windows {
        let mut x = Vec::with_capacity(width);
        for &slot in window {
            match slot {
                Slot::Word(i) => x.extend_from_slice(&word_reps[i]),
                Slot::PadWord => x.extend_from_slice(store.value(params.pad).data()),
                Slot::Relation(r) => {
                    x.extend_from_slice(store.row(params.relation_embeddings, params.relation_row(r, relations)))
                }
            }
        }
        if x.len() != width {
            return Err(PathError::ShapeMismatch(format!(
                "window input has {} values, filter expects {width}",
                x.len()
            )));
        }
        let mut z = bias.to_vec();
        gemv_acc(&mut z, filter.data(), &x);
        feature_map.push(z.into_iter().map(|v| params.activation.apply(v)).collect());
        inputs.push(x);
    }
    let (pooled, argmax) = max_pool(&feature_map);
    Ok(ConvolutionOutput {
        inputs,
        feature_map,
        pooled,
        argmax,
    })
}

/// Route `upstream` (gradient on `L`) back through pooling, the activation
/// and the filter. Returns the gradient on each path word's `p`.
pub fn conv_backward(
    params: &PathParams,
    store: &mut ParameterStore,
    windows: &[Window],
    relations: &[usize],
    output: &ConvolutionOutput,
    upstream: &[f64],
) -> Vec<Vec<f64>> {
    let word_width = params.dim + params.dim_c;
    let num_words = windows.len();
    let mut word_grads = vec![vec![0.0; word_width]; num_words];

    for (i, window) in windows.iter().enumerate() {
        let dz: Vec<f64> = upstream
            .iter()
            .enumerate()
            .map(|(j, &u)| {
                if output.argmax[j] == i {
                    u * params.activation.derivative_from_output(output.feature_map[i][j])
                } else {
                    0.0
                }
            })
            .collect();
        if dz.iter().all(|&d| d == 0.0) {
            continue;
        }
        let mut dx = vec![0.0; output.inputs[i].len()];
        gemv_t_acc(&mut dx, store.value(params.filter).data(), &dz);
        outer_acc(store.grad_mut(params.filter), &dz, &output.inputs[i]);
        axpy(store.grad_mut(params.filter_bias), 1.0, &dz);

        let mut offset = 0;
        for &slot in window {
            let w = if slot.is_word() { word_width } else { params.dim };
            let g = &dx[offset..offset + w];
            match slot {
                Slot::Word(k) => axpy(&mut word_grads[k], 1.0, g),
                Slot::PadWord => axpy(store.grad_mut(params.pad), 1.0, g),
                Slot::Relation(r) => {
                    let row = params.relation_row(r, relations);
                    axpy(store.grad_row_mut(params.relation_embeddings, row), 1.0, g)
                }
            }
            offset += w;
        }
    }
    word_grads
}
