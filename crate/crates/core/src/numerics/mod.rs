//! Numerical substrate: vectors, matrices, feedforward networks with
//! hand-written backpropagation, and first-order optimizers.

mod activation;
mod linalg;
mod net;
mod optim;

pub use activation::{activation, SwishLike, LEAKY_SLOPE};
pub use linalg::{dist, dot, norm, sq_dist, Matrix};
pub use net::{DenseNet, GradientBundle, Layer, LayerGrad, Tape};
pub use optim::{Optimizer, OptimizerConfig, OptimizerKind};

use crate::error::{domain, Result};

/// Softmax with max-subtraction.
pub fn softmax(w: &[f64]) -> Result<Vec<f64>> {
    if w.is_empty() {
        return Err(domain("softmax of an empty vector"));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(domain("softmax input contains a non-finite entry"));
    }
    Ok(softmax_unchecked(w))
}

pub(crate) fn softmax_unchecked(w: &[f64]) -> Vec<f64> {
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = w.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    out
}

/// Pull a gradient with respect to softmax probabilities back to the logits:
/// `dL/dw = p ⊙ (g − ⟨g, p⟩)`.
pub fn softmax_backward(probs: &[f64], grad_probs: &[f64]) -> Vec<f64> {
    let inner = dot(probs, grad_probs);
    probs.iter().zip(grad_probs).map(|(p, g)| p * (g - inner)).collect()
}
