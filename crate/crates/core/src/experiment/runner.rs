use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::scenarios::{generate_scenario, Scenario, ScenarioKind};
use crate::error::{config, Result};
use crate::model::{ProbabilisticTransformer, DEFAULT_CAP_RADIUS};
use crate::numerics::sq_dist;
use crate::rng::stream;
use crate::training::{train_baseline_mlp, train_classical_transformer, train_probabilistic_transformer, TrainConfig};

pub const MLP: &str = "mlp";
pub const TRANSFORMER: &str = "transformer";
pub const P_TRANSFORMER: &str = "p-transformer";
pub const MODEL_NAMES: [&str; 3] = [MLP, TRANSFORMER, P_TRANSFORMER];

/// Test-set metrics of one model on one seed. Failed runs carry NaN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub model: String,
    pub seed: u64,
    /// Mean squared Euclidean error against the clean targets.
    pub mse: f64,
    /// Mean distance from the predictions to the constraint set.
    pub d_k: f64,
    pub mse_ratio: f64,
    /// Largest distance to the set of any atom of any predicted measure
    /// (the prediction itself for the MLP).
    #[serde(skip, default = "nan")]
    pub max_support_dk: f64,
}

fn nan() -> f64 {
    f64::NAN
}

impl MetricsRow {
    pub fn failed(&self) -> bool {
        !(self.mse.is_finite() && self.d_k.is_finite())
    }
}

/// Points of a planar scenario for plotting.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScatterData {
    pub particles: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
    pub p_transformer: Vec<Vec<f64>>,
    pub mlp: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct BenchmarkOutcome {
    pub rows: Vec<MetricsRow>,
    /// Seeds with at least one failed model.
    pub failed_seeds: usize,
    pub scatter: Option<ScatterData>,
}

impl BenchmarkOutcome {
    pub fn failed_fraction(&self) -> f64 {
        let seeds = self.rows.len() / MODEL_NAMES.len();
        if seeds == 0 {
            0.0
        } else {
            self.failed_seeds as f64 / seeds as f64
        }
    }
}

/// `λ·mse + (1−λ)·d_K`.
pub fn combined_score(mse: f64, d_k: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(config(format!("λ = {lambda} lies outside [0, 1]")));
    }
    Ok(lambda * mse + (1.0 - lambda) * d_k)
}

/// Point prediction used for scoring the probabilistic transformer.
pub fn p_transformer_readout(model: &ProbabilisticTransformer, kind: ScenarioKind, x: &[f64]) -> Result<Vec<f64>> {
    match kind {
        ScenarioKind::Sphere => model.predict_frechet_localized(x, DEFAULT_CAP_RADIUS),
        ScenarioKind::Square | ScenarioKind::Disk => model.predict_mean(x),
        ScenarioKind::Rose | ScenarioKind::Variety => model.predict_mode(x),
    }
}

struct Scored {
    mse: f64,
    d_k: f64,
    max_support_dk: f64,
    predictions: Vec<Vec<f64>>,
}

fn score<F>(scenario: &Scenario, predict: F, support_dk: impl Fn(&[f64]) -> Result<f64>) -> Result<Scored>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let test = &scenario.test;
    let mut predictions = Vec::with_capacity(test.len());
    let (mut mse, mut d_k, mut max_support_dk) = (0.0, 0.0, 0.0f64);
    for (x, y) in test.inputs.iter().zip(&test.outputs) {
        let p = predict(x)?;
        mse += sq_dist(&p, y);
        d_k += scenario.set.distance(&p)?;
        max_support_dk = max_support_dk.max(support_dk(x)?);
        predictions.push(p);
    }
    let n = test.len() as f64;
    Ok(Scored { mse: mse / n, d_k: d_k / n, max_support_dk, predictions })
}

fn with_seed(cfg: &TrainConfig, seed: u64) -> TrainConfig {
    TrainConfig { seed, ..cfg.clone() }
}

/// Everything one seed produces.
pub struct SeedResult {
    pub rows: Vec<MetricsRow>,
    pub scatter: Option<ScatterData>,
}

/// Generate the scenario for `seed`, train the three models and score them.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedResult> {
    let kind = cfg.scenario;
    let scenario = generate_scenario(kind, &mut stream(seed, kind.name()), cfg.size())?;
    let set = &scenario.set;

    let mlp = train_baseline_mlp(&scenario.train, &with_seed(&cfg.models.mlp, seed)).and_then(|t| {
        let m = &t.model;
        score(&scenario, |x| m.predict(x), |x| set.distance(&m.predict(x)?))
    });
    let transformer = train_classical_transformer(&scenario.train, set, &with_seed(&cfg.models.transformer, seed))
        .and_then(|t| {
            let m = &t.model;
            score(&scenario, |x| m.classical_attention_predict(x), |x| m.predict_measure(x)?.max_distance_to(set))
        });
    let mut particles = Vec::new();
    let p_transformer =
        train_probabilistic_transformer(&scenario.train, set, &with_seed(&cfg.models.p_transformer, seed)).and_then(
            |t| {
                let m = &t.model;
                particles = m.particles().iter().map(<[f64]>::to_vec).collect();
                score(&scenario, |x| p_transformer_readout(m, kind, x), |x| m.predict_measure(x)?.max_distance_to(set))
            },
        );

    let mlp_mse = mlp.as_ref().map_or(f64::NAN, |s| s.mse);
    let row = |name: &str, r: &Result<Scored>| match r {
        Ok(s) => MetricsRow {
            scenario: kind.name().into(),
            model: name.into(),
            seed,
            mse: s.mse,
            d_k: s.d_k,
            mse_ratio: s.mse / mlp_mse,
            max_support_dk: s.max_support_dk,
        },
        Err(_) => MetricsRow {
            scenario: kind.name().into(),
            model: name.into(),
            seed,
            mse: f64::NAN,
            d_k: f64::NAN,
            mse_ratio: f64::NAN,
            max_support_dk: f64::NAN,
        },
    };
    let rows = vec![row(MLP, &mlp), row(TRANSFORMER, &transformer), row(P_TRANSFORMER, &p_transformer)];
    let scatter = match (&mlp, &p_transformer) {
        (Ok(a), Ok(b)) if kind.is_planar() => Some(ScatterData {
            particles,
            targets: scenario.test.outputs.clone(),
            p_transformer: b.predictions.clone(),
            mlp: a.predictions.clone(),
        }),
        _ => None,
    };
    Ok(SeedResult { rows, scatter })
}

/// Run every configured seed. A seed whose scenario cannot be generated is
/// an error; a model that fails to train or predict yields a NaN row and
/// the run continues.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchmarkOutcome> {
    cfg.validate()?;
    let results: Vec<SeedResult> = cfg.seeds.par_iter().map(|&s| run_seed(cfg, s)).collect::<Result<_>>()?;
    let failed_seeds = results.iter().filter(|r| r.rows.iter().any(MetricsRow::failed)).count();
    let scatter = results.iter().find_map(|r| r.scatter.clone());
    let rows = results.into_iter().flat_map(|r| r.rows).collect();
    Ok(BenchmarkOutcome { rows, failed_seeds, scatter })
}
