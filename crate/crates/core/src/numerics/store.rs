use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tensor::{Shape, Tensor};
use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Decides how a tensor is initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Xavier uniform in ±sqrt(6 / (fan_in + fan_out)).
    Weight,
    /// Zero.
    Bias,
    /// Uniform in ±0.01, one row per vocabulary entry.
    Embedding,
}

#[derive(Debug, Clone)]
pub struct Parameter {
    name: String,
    kind: ParamKind,
    value: Tensor,
    grad: Tensor,
    row_dirty: Vec<bool>,
    dirty_rows: Vec<usize>,
}

impl Parameter {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn value(&self) -> &Tensor {
        &self.value
    }

    pub fn grad(&self) -> &Tensor {
        &self.grad
    }

    fn mark(&mut self, r: usize) {
        if !self.row_dirty[r] {
            self.row_dirty[r] = true;
            self.dirty_rows.push(r);
        }
    }
}

/// Named tensors with paired gradient buffers.
///
/// Gradients are tracked per row so a step only touches the embedding rows
/// an instance actually used.
#[derive(Debug, Clone, Default)]
pub struct ParameterStore {
    params: Vec<Parameter>,
    by_name: BTreeMap<String, ParamId>,
}

impl ParameterStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        name: impl Into<String>,
        shape: Shape,
        kind: ParamKind,
    ) -> Result<ParamId, NumericsError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(NumericsError::DuplicateParameter(name));
        }
        let id = ParamId(self.params.len());
        self.params.push(Parameter {
            name: name.clone(),
            kind,
            value: Tensor::zeros(shape),
            grad: Tensor::zeros(shape),
            row_dirty: vec![false; shape.rows()],
            dirty_rows: Vec::new(),
        });
        self.by_name.insert(name, id);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Parameters in registration order.
    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Parameter)> {
        self.params.iter().enumerate().map(|(i, p)| (ParamId(i), p))
    }

    pub fn param(&self, id: ParamId) -> &Parameter {
        &self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor {
        &self.params[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.params[id.0].value
    }

    pub fn row(&self, id: ParamId, r: usize) -> &[f64] {
        self.params[id.0].value.row(r)
    }

    pub fn grad(&self, id: ParamId) -> &Tensor {
        &self.params[id.0].grad
    }

    pub fn grad_row_mut(&mut self, id: ParamId, r: usize) -> &mut [f64] {
        let p = &mut self.params[id.0];
        p.mark(r);
        p.grad.row_mut(r)
    }

    /// Whole gradient buffer; every row is marked as touched.
    pub fn grad_mut(&mut self, id: ParamId) -> &mut [f64] {
        let p = &mut self.params[id.0];
        for r in 0..p.value.shape().rows() {
            p.mark(r);
        }
        p.grad.data_mut()
    }

    /// Value of one tensor together with the gradient of another, for
    /// backward passes that read one parameter while accumulating into a
    /// different one.
    pub fn value_and_grad_mut(&mut self, value: ParamId, grad: ParamId) -> (&Tensor, &mut [f64]) {
        assert_ne!(value, grad, "use a local copy when reading and writing one tensor");
        let (v, g) = if value.0 < grad.0 {
            let (lo, hi) = self.params.split_at_mut(grad.0);
            (&lo[value.0], &mut hi[0])
        } else {
            let (lo, hi) = self.params.split_at_mut(value.0);
            (&hi[0], &mut lo[grad.0])
        };
        for r in 0..g.value.shape().rows() {
            g.mark(r);
        }
        (&v.value, g.grad.data_mut())
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            for &r in &p.dirty_rows {
                p.grad.row_mut(r).fill(0.0);
                p.row_dirty[r] = false;
            }
            p.dirty_rows.clear();
        }
    }

    /// `θ ← θ − λ·∇θ` on touched rows, then clears the gradients.
    pub fn sgd_step(&mut self, learning_rate: f64) {
        for p in &mut self.params {
            p.dirty_rows.sort_unstable();
            for &r in &p.dirty_rows {
                let cols = p.value.shape().cols();
                let (v, g) = (p.value.row_mut(r), &mut p.grad.data_mut()[r * cols..(r + 1) * cols]);
                for (v, g) in v.iter_mut().zip(g.iter_mut()) {
                    *v -= learning_rate * *g;
                    *g = 0.0;
                }
                p.row_dirty[r] = false;
            }
            p.dirty_rows.clear();
        }
    }

    /// Deterministic initialisation in registration order.
    pub fn init_uniform(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in &mut self.params {
            let shape = p.value.shape();
            let data = p.value.data_mut();
            match p.kind {
                ParamKind::Bias => data.fill(0.0),
                ParamKind::Weight => {
                    let bound = (6.0 / (shape.rows() + shape.cols()) as f64).sqrt();
                    data.iter_mut().for_each(|x| *x = rng.gen_range(-bound..bound));
                }
                ParamKind::Embedding => {
                    data.iter_mut().for_each(|x| *x = rng.gen_range(-0.01..0.01));
                }
            }
        }
        self.zero_grad();
    }

    /// First tensor holding a non-finite value, if any.
    pub fn validate(&self) -> Result<(), NumericsError> {
        match self.params.iter().find(|p| !p.value.is_finite()) {
            Some(p) => Err(NumericsError::NonFinite(p.name.clone())),
            None => Ok(()),
        }
    }
}
