use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scenarios::{ScenarioKind, ScenarioSize};
use crate::error::{config, Result};
use crate::training::{Architecture, HiddenMode, TrainConfig};

/// Training settings of the three compared models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfigs {
    pub mlp: TrainConfig,
    pub transformer: TrainConfig,
    pub p_transformer: TrainConfig,
}

/// One benchmark: a scenario, the seeds to run it with and how to train
/// each model. Every seed also overrides the `seed` of each model config.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub seeds: Vec<u64>,
    pub train_size: usize,
    pub test_size: usize,
    pub noise_std: f64,
    pub models: ModelConfigs,
    pub lambda_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// JSON form: only `scenario` is required, everything else falls back to
/// [`ExperimentConfig::default_for`].
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: ScenarioKind,
    seeds: Option<Vec<u64>>,
    train_size: Option<usize>,
    test_size: Option<usize>,
    noise_std: Option<f64>,
    models: Option<RawModels>,
    lambda_grid: Option<Vec<f64>>,
    output_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModels {
    mlp: Option<TrainConfig>,
    transformer: Option<TrainConfig>,
    p_transformer: Option<TrainConfig>,
}

impl<'de> Deserialize<'de> for ExperimentConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConfig::deserialize(d)?;
        let mut cfg = ExperimentConfig::default_for(raw.scenario);
        cfg.seeds = raw.seeds.unwrap_or(cfg.seeds);
        cfg.train_size = raw.train_size.unwrap_or(cfg.train_size);
        cfg.test_size = raw.test_size.unwrap_or(cfg.test_size);
        cfg.noise_std = raw.noise_std.unwrap_or(cfg.noise_std);
        if let Some(m) = raw.models {
            cfg.models.mlp = m.mlp.unwrap_or(cfg.models.mlp);
            cfg.models.transformer = m.transformer.unwrap_or(cfg.models.transformer);
            cfg.models.p_transformer = m.p_transformer.unwrap_or(cfg.models.p_transformer);
        }
        cfg.lambda_grid = raw.lambda_grid.unwrap_or(cfg.lambda_grid);
        cfg.output_dir = raw.output_dir;
        Ok(cfg)
    }
}

/// `{0, 0.1, …, 1}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

impl ExperimentConfig {
    /// Settings sized for a single-core desktop run.
    pub fn default_for(scenario: ScenarioKind) -> Self {
        let (train_size, seeds) = match scenario {
            ScenarioKind::Sphere => (1000, (0..20).collect()),
            _ => (900, (0..5).collect()),
        };
        let mlp = TrainConfig { epochs: 300, ..TrainConfig::default() };
        let attention =
            |cfg: TrainConfig| ModelConfigs { mlp: mlp.clone(), transformer: cfg.clone(), p_transformer: cfg };
        let models = match scenario {
            ScenarioKind::Sphere => {
                let arch = Architecture { hidden: vec![32], head_hidden: vec![32], latent_dim: 2, alpha: 0.0 };
                let cfg = TrainConfig { epochs: 20, architecture: arch, ..TrainConfig::default() };
                ModelConfigs {
                    mlp: TrainConfig { epochs: 20, ..mlp.clone() },
                    transformer: cfg.clone(),
                    p_transformer: cfg,
                }
            }
            ScenarioKind::Square | ScenarioKind::Disk => attention(TrainConfig {
                pool_size: 1024,
                anchors: 128,
                architecture: Architecture { hidden: vec![32, 32], head_hidden: vec![64], latent_dim: 2, alpha: 1.0 },
                ..TrainConfig::default()
            }),
            ScenarioKind::Rose | ScenarioKind::Variety => {
                let frozen =
                    TrainConfig { hidden_mode: HiddenMode::FrozenRandom, epochs: 60, ..TrainConfig::default() };
                let cfg = TrainConfig {
                    architecture: Architecture { hidden: vec![64], head_hidden: vec![64], latent_dim: 2, alpha: 0.0 },
                    ..frozen.clone()
                };
                ModelConfigs { mlp: frozen, transformer: cfg.clone(), p_transformer: cfg }
            }
        };
        Self {
            scenario,
            seeds,
            train_size,
            test_size: 100,
            noise_std: scenario.default_noise_std(),
            models,
            lambda_grid: default_lambda_grid(),
            output_dir: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| config(format!("invalid experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(config("at least one seed is required"));
        }
        if self.train_size == 0 || self.test_size == 0 {
            return Err(config("train and test sizes must be at least 1"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(config("noise_std must be finite and non-negative"));
        }
        if self.lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(config("λ values must lie in [0, 1]"));
        }
        for m in [&self.models.mlp, &self.models.transformer, &self.models.p_transformer] {
            m.validate()?;
        }
        Ok(())
    }

    pub fn size(&self) -> ScenarioSize {
        ScenarioSize { train: self.train_size, test: self.test_size, noise_std: self.noise_std }
    }
}
