//! Dense linear algebra, parameters with gradients, and gradient checking.

mod gradcheck;
mod serialize;
mod store;
mod tensor;

use thiserror::Error;

pub use gradcheck::{
    gradient_check, relative_error, GradCheckOptions, GradCheckReport, TensorCheck, RELATIVE_ERROR_FLOOR,
};
pub use serialize::{Dtype, ModelFile, MAGIC};
pub use store::{ParamId, ParamKind, Parameter, ParameterStore};
pub use tensor::{cosine, dot, matvec, softmax, tanh_backward, tanh_forward, Shape, Tensor};

pub(crate) use tensor::{axpy, gemv_acc, gemv_t_acc, outer_acc};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value in tensor {0}")]
    NonFinite(String),
    #[error("non-finite loss ({0})")]
    NonFiniteLoss(f64),
    #[error("parameter {0} registered twice")]
    DuplicateParameter(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("model file: {0}")]
    Format(String),
}
