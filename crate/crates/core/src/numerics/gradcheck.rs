//! Central finite-difference check of hand-derived gradients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::store::ParameterStore;
use super::NumericsError;

/// Relative errors are computed as `|a − n| / max(|a|, |n|, floor)`.
///
/// At `ε = 1e-5` a loss of order 1 carries about `1e-10` of rounding noise
/// in the central difference. The floor makes entries with gradients below
/// it answer to that absolute scale instead of turning noise into a ratio.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct GradCheckOptions {
    pub epsilon: f64,
    /// Check at most this many entries per tensor (sampled); `None` checks all.
    pub max_entries_per_tensor: Option<usize>,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions {
            epsilon: 1e-5,
            max_entries_per_tensor: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub name: String,
    pub entries_checked: usize,
    pub max_relative_error: f64,
    pub max_absolute_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GradCheckReport {
    pub tensors: Vec<TensorCheck>,
}

impl GradCheckReport {
    pub fn max_relative_error(&self) -> f64 {
        self.tensors.iter().map(|t| t.max_relative_error).fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_relative_error() < tolerance
    }

    /// Merge another report, keeping the worst error per tensor name.
    pub fn merge(&mut self, other: GradCheckReport) {
        for t in other.tensors {
            match self.tensors.iter_mut().find(|s| s.name == t.name) {
                Some(s) => {
                    s.entries_checked += t.entries_checked;
                    s.max_relative_error = s.max_relative_error.max(t.max_relative_error);
                    s.max_absolute_error = s.max_absolute_error.max(t.max_absolute_error);
                }
                None => self.tensors.push(t),
            }
        }
    }

    pub fn render(&self) -> String {
        let width = self.tensors.iter().map(|t| t.name.len()).max().unwrap_or(6).max(6);
        let mut out = format!("{:<width$}  {:>8}  {:>12}\n", "tensor", "entries", "max rel err");
        for t in &self.tensors {
            out.push_str(&format!(
                "{:<width$}  {:>8}  {:>12.3e}\n",
                t.name, t.entries_checked, t.max_relative_error
            ));
        }
        out
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR);
    (analytic - numeric).abs() / scale
}

/// Compare analytic gradients against `(L(θ+ε) − L(θ−ε)) / 2ε`.
///
/// `loss_and_grad` must accumulate the gradient of the same scalar that
/// `loss` returns into the store's gradient buffers. The store's values are
/// restored bit-exactly afterwards and its gradients are left cleared.
pub fn gradient_check<L, G>(
    store: &mut ParameterStore,
    mut loss: L,
    mut loss_and_grad: G,
    options: &GradCheckOptions,
) -> Result<GradCheckReport, NumericsError>
where
    L: FnMut(&ParameterStore) -> f64,
    G: FnMut(&mut ParameterStore) -> f64,
{
    store.zero_grad();
    let base = loss_and_grad(store);
    if !base.is_finite() {
        return Err(NumericsError::NonFiniteLoss(base));
    }
    let analytic: Vec<Vec<f64>> = store.iter().map(|(_, p)| p.grad().data().to_vec()).collect();
    store.zero_grad();

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let ids: Vec<_> = store.iter().map(|(id, _)| id).collect();
    let mut report = GradCheckReport::default();
    let eps = options.epsilon;

    for (id, grads) in ids.into_iter().zip(analytic) {
        let n = grads.len();
        let picks: Vec<usize> = match options.max_entries_per_tensor {
            Some(k) if k < n => {
                let mut v = rand::seq::index::sample(&mut rng, n, k).into_vec();
                v.sort_unstable();
                v
            }
            _ => (0..n).collect(),
        };
        let mut check = TensorCheck {
            name: store.param(id).name().to_string(),
            entries_checked: picks.len(),
            max_relative_error: 0.0,
            max_absolute_error: 0.0,
        };
        for i in picks {
            let orig = store.value(id).data()[i];
            store.value_mut(id).data_mut()[i] = orig + eps;
            let plus = loss(store);
            store.value_mut(id).data_mut()[i] = orig - eps;
            let minus = loss(store);
            store.value_mut(id).data_mut()[i] = orig;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(NumericsError::NonFiniteLoss(if plus.is_finite() {
                    minus
                } else {
                    plus
                }));
            }
            let numeric = (plus - minus) / (2.0 * eps);
            let a = grads[i];
            check.max_absolute_error = check.max_absolute_error.max((a - numeric).abs());
            check.max_relative_error = check.max_relative_error.max(relative_error(a, numeric));
        }
        report.tensors.push(check);
    }
    Ok(report)
}
