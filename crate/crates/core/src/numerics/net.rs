use rand::Rng;
use serde::{Deserialize, Serialize};

use super::activation::SwishLike;
use super::linalg::Matrix;
use crate::error::{domain, Error, Result};

/// One affine map `x ↦ Wx + b`, optionally followed by a swish-like
/// activation. A layer without activation is purely affine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Option<SwishLike>,
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    fn apply(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut pre = self.weights.mul_vec(x);
        for (p, b) in pre.iter_mut().zip(&self.bias) {
            *p += b;
        }
        let out = match self.activation {
            Some(act) => pre.iter().map(|&t| act.eval(t)).collect(),
            None => pre.clone(),
        };
        (pre, out)
    }
}

/// Feedforward network `x ↦ A_J σ(… σ(A_1 x + b_1) …) + b_J`.
///
/// Hidden layers carry a swish-like activation or none (a linear bottleneck,
/// which is how an encoder and a decoder head are fused into one network).
/// The final layer is always affine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Layer>", into = "Vec<Layer>")]
pub struct DenseNet {
    layers: Vec<Layer>,
}

impl TryFrom<Vec<Layer>> for DenseNet {
    type Error = Error;

    fn try_from(layers: Vec<Layer>) -> Result<Self> {
        Self::new(layers)
    }
}

impl From<DenseNet> for Vec<Layer> {
    fn from(net: DenseNet) -> Self {
        net.layers
    }
}

/// Activations recorded by [`DenseNet::forward`] for use in
/// [`DenseNet::backward`].
#[derive(Clone, Debug)]
pub struct Tape {
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerGrad {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Gradient of a scalar loss with respect to every weight and bias of a
/// [`DenseNet`]; shapes mirror the network.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientBundle {
    pub layers: Vec<LayerGrad>,
}

impl GradientBundle {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    weights: Matrix::zeros(l.weights.rows(), l.weights.cols()),
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for g in &mut self.layers {
            g.weights.as_mut_slice().fill(0.0);
            g.bias.fill(0.0);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for g in &mut self.layers {
            g.weights.as_mut_slice().iter_mut().for_each(|v| *v *= s);
            g.bias.iter_mut().for_each(|v| *v *= s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(|g| g.weights.as_slice().iter().chain(&g.bias).all(|&v| v == 0.0))
    }

    /// Flattened view in the same order as [`DenseNet::params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in &self.layers {
            out.extend_from_slice(g.weights.as_slice());
            out.extend_from_slice(&g.bias);
        }
        out
    }

    fn matches(&self, net: &DenseNet) -> bool {
        self.layers.len() == net.layers.len()
            && self.layers.iter().zip(&net.layers).all(|(g, l)| {
                g.weights.rows() == l.weights.rows()
                    && g.weights.cols() == l.weights.cols()
                    && g.bias.len() == l.bias.len()
            })
    }
}

impl DenseNet {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let last = layers.last().ok_or_else(|| domain("network needs at least one layer"))?;
        if last.activation.is_some() {
            return Err(domain("final layer must be affine"));
        }
        for (j, l) in layers.iter().enumerate() {
            if l.bias.len() != l.weights.rows() {
                return Err(domain(format!("layer {j}: bias length differs from weight rows")));
            }
            if l.weights.rows() == 0 || l.weights.cols() == 0 {
                return Err(domain(format!("layer {j} has an empty dimension")));
            }
        }
        for (j, pair) in layers.windows(2).enumerate() {
            if pair[1].weights.cols() != pair[0].weights.rows() {
                return Err(domain(format!(
                    "layer {} expects {} inputs but layer {j} produces {}",
                    j + 1,
                    pair[1].weights.cols(),
                    pair[0].weights.rows()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Glorot-uniform weights, zero biases. `dims` lists every width from
    /// input to output; every hidden layer gets activation `alpha`.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], alpha: f64, rng: &mut R) -> Result<Self> {
        if dims.len() < 2 {
            return Err(domain("a network needs an input and an output width"));
        }
        let act = SwishLike::new(alpha)?;
        let n_layers = dims.len() - 1;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(j, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let data = (0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)).collect();
                Ok(Layer {
                    weights: Matrix::from_vec(fan_out, fan_in, data)?,
                    bias: vec![0.0; fan_out],
                    activation: (j + 1 < n_layers).then_some(act),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    /// Chain `first` then `second`; the junction becomes a linear layer.
    pub fn compose(first: &DenseNet, second: &DenseNet) -> Result<Self> {
        if first.output_dim() != second.input_dim() {
            return Err(domain("composed networks have mismatched junction width"));
        }
        Self::new(first.layers.iter().chain(&second.layers).cloned().collect())
    }

    /// Inverse of [`DenseNet::compose`]: the first `k` layers and the rest.
    pub fn split_at(&self, k: usize) -> Result<(DenseNet, DenseNet)> {
        if k == 0 || k >= self.layers.len() {
            return Err(domain(format!("cannot split {} layers at {k}", self.layers.len())));
        }
        Ok((Self::new(self.layers[..k].to_vec())?, Self::new(self.layers[k..].to_vec())?))
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.bias.len()).sum()
    }

    /// All weights and biases, layer by layer (weights row-major, then bias).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    /// Overwrite parameters from a flat vector in [`DenseNet::params`] order.
    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(domain("flat parameter vector has the wrong length"));
        }
        let mut off = 0;
        for l in &mut self.layers {
            let w = l.weights.as_mut_slice();
            w.copy_from_slice(&flat[off..off + w.len()]);
            off += w.len();
            let nb = l.bias.len();
            l.bias.copy_from_slice(&flat[off..off + nb]);
            off += nb;
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(domain(format!("network expects input of length {}, got {}", self.input_dim(), x.len())));
        }
        Ok(())
    }

    /// Evaluate without recording a tape.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.layers.iter().fold(x.to_vec(), |h, l| l.apply(&h).1))
    }

    /// Output of the last hidden layer, i.e. the input seen by the final
    /// affine layer. For a one-layer network this is `x` itself.
    pub fn hidden_features(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let n = self.layers.len();
        Ok(self.layers[..n - 1].iter().fold(x.to_vec(), |h, l| l.apply(&h).1))
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Tape)> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.to_vec();
        for l in &self.layers {
            let (p, out) = l.apply(&h);
            inputs.push(h);
            pre.push(p);
            h = out;
        }
        Ok((h, Tape { inputs, pre }))
    }

    /// Gradient of the loss with respect to every parameter, given the
    /// gradient with respect to the network output.
    pub fn backward(&self, tape: &Tape, grad_out: &[f64]) -> Result<GradientBundle> {
        let mut acc = GradientBundle::zeros_like(self);
        self.backward_accumulate(tape, grad_out, &mut acc, false)?;
        Ok(acc)
    }

    /// Like [`DenseNet::backward`] but also returns the gradient with
    /// respect to the network input.
    pub fn backward_with_input(&self, tape: &Tape, grad_out: &[f64]) -> Result<(GradientBundle, Vec<f64>)> {
        let mut acc = GradientBundle::zeros_like(self);
        let dx = self.backward_accumulate(tape, grad_out, &mut acc, true)?;
        Ok((acc, dx.unwrap_or_default()))
    }

    /// Add this sample's parameter gradient into `acc`. The input gradient
    /// is only formed when `want_input_grad` is set.
    pub fn backward_accumulate(
        &self,
        tape: &Tape,
        grad_out: &[f64],
        acc: &mut GradientBundle,
        want_input_grad: bool,
    ) -> Result<Option<Vec<f64>>> {
        let stale = tape.inputs.len() != self.layers.len()
            || self
                .layers
                .iter()
                .zip(tape.inputs.iter().zip(&tape.pre))
                .any(|(l, (i, p))| i.len() != l.input_dim() || p.len() != l.output_dim());
        if stale {
            return Err(domain("tape was not produced by this network"));
        }
        if grad_out.len() != self.output_dim() {
            return Err(domain("output gradient has the wrong length"));
        }
        if !acc.matches(self) {
            return Err(domain("gradient accumulator does not match the network"));
        }

        let mut delta = grad_out.to_vec();
        for j in (0..self.layers.len()).rev() {
            let layer = &self.layers[j];
            if let Some(act) = layer.activation {
                for (d, &t) in delta.iter_mut().zip(&tape.pre[j]) {
                    *d *= act.derivative(t);
                }
            }
            let g = &mut acc.layers[j];
            g.weights.add_outer(1.0, &delta, &tape.inputs[j]);
            for (b, d) in g.bias.iter_mut().zip(&delta) {
                *b += d;
            }
            if j > 0 || want_input_grad {
                delta = layer.weights.tr_mul_vec(&delta);
            }
        }
        Ok(want_input_grad.then_some(delta))
    }
}
