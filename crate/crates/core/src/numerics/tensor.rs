use std::fmt;

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Vector(usize),
    Matrix(usize, usize),
}

impl Shape {
    /// Vectors count as a single row.
    pub fn rows(self) -> usize {
        match self {
            Shape::Vector(_) => 1,
            Shape::Matrix(r, _) => r,
        }
    }

    pub fn cols(self) -> usize {
        match self {
            Shape::Vector(n) => n,
            Shape::Matrix(_, c) => c,
        }
    }

    pub fn len(self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Vector(n) => write!(f, "{n}"),
            Shape::Matrix(r, c) => write!(f, "{r}x{c}"),
        }
    }
}

/// Dense row-major tensor of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Shape,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: Shape) -> Self {
        Tensor {
            shape,
            data: vec![0.0; shape.len()],
        }
    }

    pub fn from_vec(shape: Shape, data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != shape.len() {
            return Err(NumericsError::ShapeMismatch(format!(
                "{} values for shape {shape}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn vector(data: Vec<f64>) -> Self {
        Tensor {
            shape: Shape::Vector(data.len()),
            data,
        }
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        Self::from_vec(Shape::Matrix(rows, cols), data)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.shape.cols();
        &self.data[r * c..(r + 1) * c]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let c = self.shape.cols();
        &mut self.data[r * c..(r + 1) * c]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Matrix-vector product `m · v`.
pub fn matvec(m: &Tensor, v: &Tensor) -> Result<Tensor, NumericsError> {
    let Shape::Matrix(rows, cols) = m.shape() else {
        return Err(NumericsError::ShapeMismatch("matvec needs a matrix".into()));
    };
    if v.shape() != Shape::Vector(cols) {
        return Err(NumericsError::ShapeMismatch(format!(
            "{} matrix times {} vector",
            m.shape(),
            v.shape()
        )));
    }
    let mut out = vec![0.0; rows];
    gemv_acc(&mut out, m.data(), v.data());
    Ok(Tensor::vector(out))
}

pub fn tanh_forward(v: &Tensor) -> Tensor {
    Tensor {
        shape: v.shape,
        data: v.data.iter().map(|x| x.tanh()).collect(),
    }
}

/// Gradient through tanh given its output `y`: `upstream ⊙ (1 − y²)`.
pub fn tanh_backward(y: &Tensor, upstream: &Tensor) -> Result<Tensor, NumericsError> {
    if y.shape() != upstream.shape() {
        return Err(NumericsError::ShapeMismatch(format!(
            "tanh output {} vs upstream {}",
            y.shape(),
            upstream.shape()
        )));
    }
    Ok(Tensor {
        shape: y.shape,
        data: y
            .data
            .iter()
            .zip(&upstream.data)
            .map(|(y, u)| u * (1.0 - y * y))
            .collect(),
    })
}

/// Max-subtracted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `out += m · v`, with `m` row-major of `out.len()` rows.
pub(crate) fn gemv_acc(out: &mut [f64], m: &[f64], v: &[f64]) {
    let cols = v.len();
    debug_assert_eq!(m.len(), out.len() * cols);
    for (o, row) in out.iter_mut().zip(m.chunks_exact(cols)) {
        *o += dot(row, v);
    }
}

/// `out += mᵀ · v`, with `m` row-major of `v.len()` rows.
pub(crate) fn gemv_t_acc(out: &mut [f64], m: &[f64], v: &[f64]) {
    let cols = out.len();
    debug_assert_eq!(m.len(), v.len() * cols);
    for (&s, row) in v.iter().zip(m.chunks_exact(cols)) {
        if s == 0.0 {
            continue;
        }
        axpy(out, s, row);
    }
}

/// `g += a · bᵀ`.
pub(crate) fn outer_acc(g: &mut [f64], a: &[f64], b: &[f64]) {
    let cols = b.len();
    debug_assert_eq!(g.len(), a.len() * cols);
    for (&s, row) in a.iter().zip(g.chunks_exact_mut(cols)) {
        if s == 0.0 {
            continue;
        }
        axpy(row, s, b);
    }
}

pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * x;
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}
