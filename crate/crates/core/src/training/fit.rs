//! Minibatch first-order fitting and the training objectives.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{HiddenMode, LabelMatrix, LossKind};
use crate::error::{domain, Error, Result};
use crate::model::ProbabilisticTransformer;
use crate::numerics::{softmax_backward, softmax_unchecked, DenseNet, GradientBundle, Optimizer, OptimizerConfig};

/// Settings of one call to [`fit_network`].
#[derive(Clone, Copy, Debug)]
pub struct FitSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    pub hidden_mode: HiddenMode,
}

/// Minimize the mean of `loss(t, net(inputs[t]))` over minibatches.
///
/// `loss` returns the per-sample loss and its gradient with respect to the
/// network output. The returned trace holds the mean loss before training
/// followed by the running mean loss of every epoch. In frozen mode only the
/// final layer moves; the hidden features are computed once.
pub fn fit_network<L, R>(
    net: &mut DenseNet,
    inputs: &[Vec<f64>],
    loss: L,
    settings: &FitSettings,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    L: Fn(usize, &[f64]) -> (f64, Vec<f64>),
    R: Rng + ?Sized,
{
    if settings.batch_size == 0 {
        return Err(crate::error::config("batch size must be positive"));
    }
    settings.optimizer.validate()?;
    if inputs.is_empty() {
        return Err(domain("no training samples"));
    }
    match settings.hidden_mode {
        HiddenMode::FrozenRandom if net.depth() > 1 => {
            let features = inputs.iter().map(|x| net.hidden_features(x)).collect::<Result<Vec<_>>>()?;
            let last = net.depth() - 1;
            let mut top = DenseNet::new(vec![net.layers()[last].clone()])?;
            let trace = fit_all_layers(&mut top, &features, &loss, settings, rng)?;
            net.layers_mut()[last] = top.layers()[0].clone();
            Ok(trace)
        }
        _ => fit_all_layers(net, inputs, &loss, settings, rng),
    }
}

fn fit_all_layers<L, R>(
    net: &mut DenseNet,
    inputs: &[Vec<f64>],
    loss: &L,
    settings: &FitSettings,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    L: Fn(usize, &[f64]) -> (f64, Vec<f64>),
    R: Rng + ?Sized,
{
    let count = inputs.len() as f64;
    let initial = inputs.iter().enumerate().try_fold(0.0, |acc, (t, x)| {
        let v = loss(t, &net.predict(x)?).0;
        Ok::<_, Error>(acc + v)
    })? / count;
    check_finite(initial, 0)?;
    let mut trace = vec![initial];

    let mut opt = Optimizer::new(settings.optimizer)?;
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut acc = GradientBundle::zeros_like(net);
    for epoch in 1..=settings.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        for batch in order.chunks(settings.batch_size) {
            acc.fill_zero();
            for &t in batch {
                let (out, tape) = net.forward(&inputs[t])?;
                let (l, g) = loss(t, &out);
                check_finite(l, epoch)?;
                total += l;
                net.backward_accumulate(&tape, &g, &mut acc, false)?;
            }
            acc.scale(1.0 / batch.len() as f64);
            opt.step(net, &acc)?;
        }
        trace.push(total / count);
    }
    Ok(trace)
}

fn check_finite(loss: f64, epoch: usize) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged(format!("loss became {loss} in epoch {epoch}")))
    }
}

/// Per-sample classifier loss on the logits and its logit gradient.
///
/// The squared loss is `Σ_n (L_n − p_n)²`; cross-entropy uses the label row
/// normalized to a distribution.
pub fn classifier_loss(kind: LossKind, labels: &[f64], logits: &[f64]) -> (f64, Vec<f64>) {
    let p = softmax_unchecked(logits);
    match kind {
        LossKind::NearestLabelCrossEntropy => {
            let mass: f64 = labels.iter().sum();
            let loss = -labels.iter().zip(&p).filter(|(l, _)| **l > 0.0).map(|(l, q)| l / mass * q.ln()).sum::<f64>();
            (loss, p.iter().zip(labels).map(|(q, l)| q - l / mass).collect())
        }
        _ => {
            let diff: Vec<f64> = p.iter().zip(labels).map(|(q, l)| q - l).collect();
            let loss = diff.iter().map(|d| d * d).sum();
            let dp: Vec<f64> = diff.iter().map(|d| 2.0 * d).collect();
            (loss, softmax_backward(&p, &dp))
        }
    }
}

/// `Σ_n D_n p_n` with `p = Softmax(logits)` and its logit gradient.
pub fn transport_loss(distances: &[f64], logits: &[f64]) -> (f64, Vec<f64>) {
    let p = softmax_unchecked(logits);
    let loss = p.iter().zip(distances).map(|(a, b)| a * b).sum();
    (loss, softmax_backward(&p, distances))
}

/// Fit `net` to the indicator rows of `labels`.
pub fn fit_classifier<R: Rng + ?Sized>(
    net: &mut DenseNet,
    inputs: &[Vec<f64>],
    labels: &LabelMatrix,
    kind: LossKind,
    settings: &FitSettings,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if net.output_dim() != labels.cols() || labels.rows() != inputs.len() {
        return Err(domain("classifier output width or sample count does not match the labels"));
    }
    fit_network(net, inputs, |t, out| classifier_loss(kind, labels.row(t), out), settings, rng)
}

/// Gradient of a probabilistic transformer's loss, split along its two nets.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelGradient {
    pub encoder: GradientBundle,
    pub head: GradientBundle,
}

/// `Σ_t Σ_n D_n(y_t) Softmax(f̂(x_t))_n` with `D_n(y) = (1/Q) Σ_q ‖y − Y_{n,q}‖`.
pub fn wasserstein_loss(model: &ProbabilisticTransformer, inputs: &[Vec<f64>], outputs: &[Vec<f64>]) -> Result<f64> {
    Ok(wasserstein_loss_and_grad(model, inputs, outputs)?.0)
}

/// [`wasserstein_loss`] and its gradient with respect to every parameter.
pub fn wasserstein_loss_and_grad(
    model: &ProbabilisticTransformer,
    inputs: &[Vec<f64>],
    outputs: &[Vec<f64>],
) -> Result<(f64, ModelGradient)> {
    if inputs.len() != outputs.len() {
        return Err(domain("batch inputs and outputs differ in length"));
    }
    let (encoder, head) = (model.encoder(), model.head());
    let mut grad =
        ModelGradient { encoder: GradientBundle::zeros_like(encoder), head: GradientBundle::zeros_like(head) };
    let mut total = 0.0;
    for (x, y) in inputs.iter().zip(outputs) {
        if y.len() != model.particles().m() {
            return Err(domain("target dimension differs from the particles'"));
        }
        let (z, enc_tape) = encoder.forward(x)?;
        let (logits, head_tape) = head.forward(&z)?;
        let (l, dlogits) = transport_loss(&model.particles().mean_distances(y), &logits);
        total += l;
        let dz = head.backward_accumulate(&head_tape, &dlogits, &mut grad.head, true)?.unwrap_or_default();
        encoder.backward_accumulate(&enc_tape, &dz, &mut grad.encoder, false)?;
    }
    Ok((total, grad))
}
