//! Probabilistic transformer networks whose predictions are guaranteed to lie
//! in a prescribed constraint set `K`.
//!
//! The model pays attention to a fixed array of particles drawn from `K`. Its
//! raw output is a finitely supported probability measure over those
//! particles, so every atom of every prediction is a member of `K` by
//! construction. A readout collapses the measure to a point:
//!
//! | readout | valid for | guarantee |
//! |---------|-----------|-----------|
//! | [`model::ProbabilisticTransformer::predict_mean`] | convex `K` | mean lies in `K` |
//! | [`model::ProbabilisticTransformer::predict_frechet`] | geodesic balls (sphere caps) | intrinsic mean lies in `K` |
//! | [`model::ProbabilisticTransformer::predict_mode`] | any `K` | most likely particle |
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: dense feedforward networks, the swish-like activation
//!   family, softmax, manual backpropagation and first-order optimizers.
//! - [`constraints`]: constraint sets (box, ball, sphere, parametric curves)
//!   with sampling, distance, projection and geodesic operations.
//! - [`measures`]: discrete measures, probabilistic attention, the
//!   closed-form Wasserstein-1 distance to a point mass and Fréchet means.
//! - [`model`]: the probabilistic transformer and the MLP baseline.
//! - [`training`]: particle selection, nearest-particle labels, classifier
//!   fitting and the Wasserstein training objective.
//! - [`experiment`]: seeded scenarios, the benchmark runner and CSV/SVG
//!   reporting.

pub mod constraints;
pub mod error;
pub mod experiment;
pub mod measures;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod training;

pub use constraints::{ConstraintSet, CurveShape, CurveSpec, GeodesicSpace};
pub use error::{Error, Result};
pub use measures::{DiscreteMeasure, FrechetOptions, ParticleArray};
pub use model::{MlpRegressor, ProbabilisticTransformer};
pub use numerics::{DenseNet, GradientBundle, Matrix, OptimizerConfig, OptimizerKind};
pub use training::{Dataset, TrainConfig};
