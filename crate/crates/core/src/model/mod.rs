//! The probabilistic transformer and the unconstrained MLP baseline.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::error::{domain, Error, Result};
use crate::measures::{self, frechet_mean, DiscreteMeasure, FrechetOptions, ParticleArray};
use crate::numerics::{softmax, DenseNet};

/// Geodesic radius, around the most likely particle, of the cap kept by
/// [`ProbabilisticTransformer::predict_frechet_localized`].
pub const DEFAULT_CAP_RADIUS: f64 = FRAC_PI_4;

/// Encoder `ℝⁿ → ℝ^d`, decoder head `ℝ^d → ℝ^N` and an `N × Q × m` particle
/// array in `K`. A prediction is the measure
/// `P-attention(head(encoder(x)), Y)`, so its support is always inside `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransformer")]
pub struct ProbabilisticTransformer {
    encoder: DenseNet,
    head: DenseNet,
    particles: ParticleArray,
    constraint_set: ConstraintSet,
}

#[derive(Deserialize)]
struct RawTransformer {
    encoder: DenseNet,
    head: DenseNet,
    particles: ParticleArray,
    constraint_set: ConstraintSet,
}

impl TryFrom<RawTransformer> for ProbabilisticTransformer {
    type Error = Error;

    fn try_from(raw: RawTransformer) -> Result<Self> {
        Self::new(raw.encoder, raw.head, raw.particles, raw.constraint_set)
    }
}

impl ProbabilisticTransformer {
    pub fn new(
        encoder: DenseNet,
        head: DenseNet,
        particles: ParticleArray,
        constraint_set: ConstraintSet,
    ) -> Result<Self> {
        if encoder.output_dim() != head.input_dim() {
            return Err(domain(format!(
                "encoder emits {} latents but the head expects {}",
                encoder.output_dim(),
                head.input_dim()
            )));
        }
        if head.output_dim() != particles.n() {
            return Err(domain(format!("head emits {} logits for {} particle rows", head.output_dim(), particles.n())));
        }
        if particles.m() != constraint_set.ambient_dim() {
            return Err(domain("particle dimension differs from the constraint set's"));
        }
        particles.check_membership(&constraint_set)?;
        Ok(Self { encoder, head, particles, constraint_set })
    }

    pub fn encoder(&self) -> &DenseNet {
        &self.encoder
    }

    pub fn head(&self) -> &DenseNet {
        &self.head
    }

    pub fn particles(&self) -> &ParticleArray {
        &self.particles
    }

    pub fn constraint_set(&self) -> &ConstraintSet {
        &self.constraint_set
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    /// Attention logits `head(encoder(x))`.
    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.head.predict(&self.encoder.predict(x)?)
    }

    pub fn predict_measure(&self, x: &[f64]) -> Result<DiscreteMeasure> {
        measures::p_attention(&self.logits(x)?, &self.particles)
    }

    /// Mean of the predicted measure. Lies in `K` whenever `K` is convex.
    pub fn predict_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(measures::expectation(&self.predict_measure(x)?))
    }

    /// Fréchet mean of the predicted measure on the set's geodesic
    /// structure. Fails when the set has none or the atoms are too spread.
    pub fn predict_frechet(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.predict_frechet_with(x, FrechetOptions::default())
    }

    pub fn predict_frechet_with(&self, x: &[f64], opts: FrechetOptions) -> Result<Vec<f64>> {
        let space = self.geodesic_space()?;
        frechet_mean(&self.predict_measure(x)?, space, opts)
    }

    /// Fréchet mean of the predicted measure conditioned on the geodesic
    /// cap of radius `radius` around its most likely particle.
    ///
    /// With `radius ≤ π/4` every pair of retained atoms is within `π/2`,
    /// so the mean is well defined even when the full measure spreads over
    /// the whole sphere.
    pub fn predict_frechet_localized(&self, x: &[f64], radius: f64) -> Result<Vec<f64>> {
        let space = self.geodesic_space()?;
        let mu = self.predict_measure(x)?;
        let center = measures::mode(&mu);
        let local = mu
            .restrict(|a| space.dist(a, &center).is_ok_and(|d| d <= radius))
            .ok_or_else(|| domain("no mass left inside the geodesic cap"))?;
        frechet_mean(&local, space, FrechetOptions::default())
    }

    /// The most likely particle.
    pub fn predict_mode(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(measures::mode(&self.predict_measure(x)?))
    }

    /// `Softmax_N(w)ᵀ Ȳ` computed directly from the logits, without forming
    /// the measure.
    pub fn classical_attention_predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        let probs = softmax(&self.logits(x)?)?;
        Ok(attention_readout(&probs, &self.particles.row_means()))
    }

    fn geodesic_space(&self) -> Result<&'static dyn crate::constraints::GeodesicSpace> {
        self.constraint_set
            .geodesic_ops()
            .ok_or_else(|| Error::Capability(format!("{} set has no geodesic structure", self.constraint_set.name())))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `Σ_n p_n Ȳ_n`.
pub(crate) fn attention_readout(probs: &[f64], row_means: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; row_means[0].len()];
    for (p, row) in probs.iter().zip(row_means) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += p * v;
        }
    }
    out
}

/// Feedforward regressor `ℝⁿ → ℝ^m` with no constraint handling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpRegressor {
    pub net: DenseNet,
}

impl MlpRegressor {
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.net.predict(x)
    }
}
