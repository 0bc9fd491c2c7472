//! Fitting probabilistic transformers and the two baselines.
//!
//! A probabilistic transformer is trained in three steps: draw a pool of
//! members of `K` and pick particles from it, label every training output
//! with its nearest anchors, then fit the attention logits to those labels
//! (or to the Wasserstein objective).

mod fit;
mod particles;

pub use fit::{
    classifier_loss, fit_classifier, fit_network, transport_loss, wasserstein_loss, wasserstein_loss_and_grad,
    FitSettings, ModelGradient,
};
pub use particles::{gather_particles, kmeans_anchors, make_labels, select_particles, LabelMatrix, LABEL_TIE_TOL};

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::error::{config, domain, Result};
use crate::model::{attention_readout, MlpRegressor, ProbabilisticTransformer};
use crate::numerics::{softmax_backward, softmax_unchecked, DenseNet, OptimizerConfig};
use crate::rng::stream;

/// Paired inputs `x_t ∈ ℝⁿ` and outputs `y_t ∈ ℝ^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(domain("a dataset needs equally many inputs and outputs, at least one"));
        }
        let (n, m) = (inputs[0].len(), outputs[0].len());
        if inputs.iter().any(|x| x.len() != n) || outputs.iter().any(|y| y.len() != m) {
            return Err(domain("dataset rows have inconsistent dimensions"));
        }
        Ok(Self { inputs, outputs })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.outputs[0].len()
    }
}

/// Which parameters the optimizer may move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenMode {
    #[default]
    Trained,
    /// Hidden weights keep their random initialization; only the final
    /// layer is fitted.
    FrozenRandom,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Squared error between the label row and the attention weights.
    #[default]
    NearestLabelMse,
    /// Transport cost from the predicted measure to the target.
    Wasserstein,
    NearestLabelCrossEntropy,
}

/// Where the pool of candidate particles comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleSource {
    /// The constraint set's own sampler.
    #[default]
    SetSampler,
    /// The training outputs, which must then be members of the set.
    TrainingOutputs,
}

/// Network widths shared by the three models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Architecture {
    /// Hidden widths of the encoder and of the MLP baseline.
    pub hidden: Vec<usize>,
    /// Hidden widths of the decoder head.
    pub head_hidden: Vec<usize>,
    /// Encoder output width.
    pub latent_dim: usize,
    pub alpha: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Self { hidden: vec![64, 64, 64], head_hidden: vec![64], latent_dim: 2, alpha: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Pool size `S`.
    #[serde(alias = "S")]
    pub pool_size: usize,
    /// Anchor count `N`.
    #[serde(alias = "N")]
    pub anchors: usize,
    /// Particles per anchor `Q`.
    #[serde(alias = "Q")]
    pub particles_per_anchor: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    pub hidden_mode: HiddenMode,
    pub loss: LossKind,
    pub particle_source: ParticleSource,
    pub architecture: Architecture,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            pool_size: 512,
            anchors: 64,
            particles_per_anchor: 1,
            epochs: 300,
            batch_size: 32,
            optimizer: OptimizerConfig::default(),
            hidden_mode: HiddenMode::Trained,
            loss: LossKind::NearestLabelMse,
            particle_source: ParticleSource::SetSampler,
            architecture: Architecture::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.anchors == 0 || self.particles_per_anchor == 0 {
            return Err(config("N and Q must be at least 1"));
        }
        if self.anchors * self.particles_per_anchor > self.pool_size {
            return Err(config(format!(
                "N·Q = {} exceeds the pool size {}",
                self.anchors * self.particles_per_anchor,
                self.pool_size
            )));
        }
        if self.batch_size == 0 {
            return Err(config("batch size must be positive"));
        }
        if self.architecture.latent_dim == 0
            || self.architecture.hidden.iter().chain(&self.architecture.head_hidden).any(|&w| w == 0)
        {
            return Err(config("layer widths must be positive"));
        }
        if !(0.0..=1.0).contains(&self.architecture.alpha) {
            return Err(config("activation α must lie in [0, 1]"));
        }
        self.optimizer.validate()
    }

    fn settings(&self) -> FitSettings {
        FitSettings {
            epochs: self.epochs,
            batch_size: self.batch_size,
            optimizer: self.optimizer,
            hidden_mode: self.hidden_mode,
        }
    }
}

/// A trained model with the loss trace of its fit: the mean loss before
/// training, then one entry per epoch.
#[derive(Clone, Debug)]
pub struct Trained<M> {
    pub model: M,
    pub trace: Vec<f64>,
}

/// Write `epoch,loss` rows.
pub fn write_loss_trace(path: impl AsRef<Path>, trace: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["epoch", "loss"])?;
    for (e, l) in trace.iter().enumerate() {
        w.write_record([e.to_string(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn dims(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    std::iter::once(input).chain(hidden.iter().copied()).chain(std::iter::once(output)).collect()
}

/// Pool, anchors and particles shared by both attention models for a seed.
fn particles_for(
    data: &Dataset,
    set: &ConstraintSet,
    cfg: &TrainConfig,
) -> Result<(Vec<Vec<f64>>, crate::ParticleArray)> {
    let mut rng = stream(cfg.seed, "particles");
    let source = match cfg.particle_source {
        ParticleSource::SetSampler => set.clone(),
        ParticleSource::TrainingOutputs => ConstraintSet::empirical(data.outputs.clone())?,
    };
    let pool = source.generate(&mut rng, cfg.pool_size);
    for p in &pool {
        if !set.contains(p)? {
            return Err(domain("a pool point is not a member of the constraint set"));
        }
    }
    select_particles(&pool, cfg.anchors, cfg.particles_per_anchor, &mut rng)
}

/// Encoder and head initialized for `N` particle rows, fused into one net.
fn init_attention_net(data: &Dataset, cfg: &TrainConfig, label: &str) -> Result<(DenseNet, usize)> {
    let a = &cfg.architecture;
    let mut rng = stream(cfg.seed, &format!("{label}/init"));
    let encoder = DenseNet::random(&dims(data.input_dim(), &a.hidden, a.latent_dim), a.alpha, &mut rng)?;
    let head = DenseNet::random(&dims(a.latent_dim, &a.head_hidden, cfg.anchors), a.alpha, &mut rng)?;
    Ok((DenseNet::compose(&encoder, &head)?, encoder.depth()))
}

fn assemble(
    net: DenseNet,
    split: usize,
    particles: crate::ParticleArray,
    set: &ConstraintSet,
) -> Result<ProbabilisticTransformer> {
    let (encoder, head) = net.split_at(split)?;
    ProbabilisticTransformer::new(encoder, head, particles, set.clone())
}

/// Select particles in `set`, label the training outputs and fit the
/// attention logits with the configured loss.
pub fn train_probabilistic_transformer(
    data: &Dataset,
    set: &ConstraintSet,
    cfg: &TrainConfig,
) -> Result<Trained<ProbabilisticTransformer>> {
    cfg.validate()?;
    if data.output_dim() != set.ambient_dim() {
        return Err(domain("training outputs do not live in the constraint set's space"));
    }
    let (anchors, particles) = particles_for(data, set, cfg)?;
    let (mut net, split) = init_attention_net(data, cfg, "p-transformer")?;
    let mut rng = stream(cfg.seed, "p-transformer/shuffle");
    let trace = match cfg.loss {
        LossKind::Wasserstein => {
            let dists: Vec<Vec<f64>> = data.outputs.iter().map(|y| particles.mean_distances(y)).collect();
            fit_network(&mut net, &data.inputs, |t, out| transport_loss(&dists[t], out), &cfg.settings(), &mut rng)?
        }
        kind => {
            let labels = make_labels(&data.outputs, &anchors)?;
            fit_classifier(&mut net, &data.inputs, &labels, kind, &cfg.settings(), &mut rng)?
        }
    };
    Ok(Trained { model: assemble(net, split, particles, set)?, trace })
}

/// The same architecture and particles as the probabilistic transformer,
/// fitted by squared error through the readout `Softmax(w)ᵀȲ`.
pub fn train_classical_transformer(
    data: &Dataset,
    set: &ConstraintSet,
    cfg: &TrainConfig,
) -> Result<Trained<ProbabilisticTransformer>> {
    cfg.validate()?;
    if data.output_dim() != set.ambient_dim() {
        return Err(domain("training outputs do not live in the constraint set's space"));
    }
    let (_, particles) = particles_for(data, set, cfg)?;
    let means = particles.row_means();
    let (mut net, split) = init_attention_net(data, cfg, "transformer")?;
    let mut rng = stream(cfg.seed, "transformer/shuffle");
    let loss = |t: usize, logits: &[f64]| {
        let p = softmax_unchecked(logits);
        let pred = attention_readout(&p, &means);
        let r: Vec<f64> = pred.iter().zip(&data.outputs[t]).map(|(a, b)| a - b).collect();
        let dp: Vec<f64> = means.iter().map(|yn| 2.0 * crate::numerics::dot(&r, yn)).collect();
        (crate::numerics::dot(&r, &r), softmax_backward(&p, &dp))
    };
    let trace = fit_network(&mut net, &data.inputs, loss, &cfg.settings(), &mut rng)?;
    Ok(Trained { model: assemble(net, split, particles, set)?, trace })
}

/// Feedforward regression by squared error on the raw outputs.
pub fn train_baseline_mlp(data: &Dataset, cfg: &TrainConfig) -> Result<Trained<MlpRegressor>> {
    cfg.validate()?;
    let a = &cfg.architecture;
    let mut net = DenseNet::random(
        &dims(data.input_dim(), &a.hidden, data.output_dim()),
        a.alpha,
        &mut stream(cfg.seed, "mlp/init"),
    )?;
    let loss = |t: usize, out: &[f64]| {
        let r: Vec<f64> = out.iter().zip(&data.outputs[t]).map(|(a, b)| a - b).collect();
        (crate::numerics::dot(&r, &r), r.iter().map(|v| 2.0 * v).collect())
    };
    let trace = fit_network(&mut net, &data.inputs, loss, &cfg.settings(), &mut stream(cfg.seed, "mlp/shuffle"))?;
    Ok(Trained { model: MlpRegressor { net }, trace })
}

/// Append `label,epoch,loss` rows for several traces to one writer.
pub fn write_traces<W: Write>(out: W, traces: &[(&str, &[f64])]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "epoch", "loss"])?;
    for (label, trace) in traces {
        for (e, l) in trace.iter().enumerate() {
            w.write_record([label.to_string(), e.to_string(), l.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
