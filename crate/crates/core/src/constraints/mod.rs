//! Constraint sets `K ⊆ ℝ^m` described by their capabilities.
//!
//! Every set can sample its own members and estimate `d_K(y) = inf_{k∈K} ‖y−k‖`.
//! Convex sets and the sphere also expose a metric projection, and the
//! sphere exposes geodesic operations for the Fréchet readout.

mod curve;
mod geodesic;

pub use curve::{curve_eval, sinc, CurveSet, CurveShape, CurveSpec, PARAM_MAX, PARAM_MIN, REFERENCE_SAMPLES};
pub use geodesic::{sphere_dist, sphere_exp, sphere_log, Euclidean, GeodesicSpace, UnitSphere, SPHERE_NORM_TOL};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{dist, norm};

/// Distance tolerance for sets whose membership is decided analytically.
pub const ANALYTIC_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSet {
    /// The cube `[−1, 1]^dim`.
    Box { dim: usize },
    /// The closed unit ball of `ℝ^dim`.
    Ball { dim: usize },
    /// The unit sphere in `ℝ^dim`.
    Sphere { dim: usize },
    /// Image of a planar parametric curve over `[−10, 10]`.
    Curve(CurveSet),
    /// A finite set of points, e.g. the available training outputs.
    Empirical { points: Vec<Vec<f64>> },
}

impl ConstraintSet {
    pub fn square() -> Self {
        Self::Box { dim: 2 }
    }

    pub fn disk() -> Self {
        Self::Ball { dim: 2 }
    }

    pub fn sphere() -> Self {
        Self::Sphere { dim: 3 }
    }

    pub fn curve(spec: CurveSpec) -> Self {
        Self::Curve(CurveSet::from(spec))
    }

    pub fn empirical(points: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.first().map(Vec::len).ok_or_else(|| domain("empirical set needs at least one point"))?;
        if m == 0 || points.iter().any(|p| p.len() != m) {
            return Err(domain("empirical points must share a positive dimension"));
        }
        Ok(Self::Empirical { points })
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Box { dim } | Self::Ball { dim } | Self::Sphere { dim } => *dim,
            Self::Curve(_) => 2,
            Self::Empirical { points } => points[0].len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Box { .. } => "box",
            Self::Ball { .. } => "ball",
            Self::Sphere { .. } => "sphere",
            Self::Curve(c) => match c.spec().shape {
                CurveShape::Rose => "rose",
                CurveShape::Variety => "variety",
            },
            Self::Empirical { .. } => "empirical",
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, Self::Box { .. } | Self::Ball { .. })
    }

    /// Largest `d_K` at which a point still counts as a member.
    pub fn tolerance(&self) -> f64 {
        match self {
            Self::Curve(c) => 2.0 * c.resolution(),
            _ => ANALYTIC_TOL,
        }
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.ambient_dim() {
            return Err(domain(format!(
                "point of dimension {} for a set in dimension {}",
                y.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Euclidean distance from `y` to the set.
    pub fn distance(&self, y: &[f64]) -> Result<f64> {
        self.check_dim(y)?;
        Ok(match self {
            Self::Box { .. } => y.iter().map(|v| (v.abs() - 1.0).max(0.0).powi(2)).sum::<f64>().sqrt(),
            Self::Ball { .. } => (norm(y) - 1.0).max(0.0),
            Self::Sphere { .. } => (norm(y) - 1.0).abs(),
            Self::Curve(c) => c.distance(y),
            Self::Empirical { points } => points.iter().map(|p| dist(p, y)).fold(f64::INFINITY, f64::min),
        })
    }

    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        Ok(self.distance(y)? <= self.tolerance())
    }

    /// Metric projection onto the set, where a closed form exists.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        match self {
            Self::Box { .. } => Ok(box_project(y)),
            Self::Ball { .. } => Ok(ball_project(y)),
            Self::Sphere { .. } => {
                let n = norm(y);
                if n == 0.0 {
                    let mut e = vec![0.0; y.len()];
                    e[0] = 1.0;
                    Ok(e)
                } else {
                    Ok(y.iter().map(|v| v / n).collect())
                }
            }
            Self::Curve(_) | Self::Empirical { .. } => {
                Err(Error::Capability(format!("{} set has no closed-form projection", self.name())))
            }
        }
    }

    pub fn has_projection(&self) -> bool {
        matches!(self, Self::Box { .. } | Self::Ball { .. } | Self::Sphere { .. })
    }

    pub fn geodesic_ops(&self) -> Option<&'static dyn GeodesicSpace> {
        match self {
            Self::Sphere { .. } => Some(&UnitSphere),
            _ => None,
        }
    }

    /// One member of the set.
    ///
    /// Box and ball draw uniformly from `[−2, 2]^m` and project, which puts
    /// a share of the mass on the boundary. The sphere normalizes a Gaussian
    /// vector; curves evaluate a uniform parameter.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Self::Box { dim } => box_project(&uniform_cube(*dim, 2.0, rng)),
            Self::Ball { dim } => ball_project(&uniform_cube(*dim, 2.0, rng)),
            Self::Sphere { dim } => loop {
                let v: Vec<f64> = (0..*dim).map(|_| rng.sample(StandardNormal)).collect();
                let n = norm(&v);
                if n > 1e-12 {
                    break v.into_iter().map(|x| x / n).collect();
                }
            },
            Self::Curve(c) => c.sample(rng),
            Self::Empirical { points } => points[rng.random_range(0..points.len())].clone(),
        }
    }

    /// `count` members of the set. Empirical sets subsample their points
    /// without replacement while enough remain.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<Vec<f64>> {
        match self {
            Self::Empirical { points } if count <= points.len() => {
                sample_indices(rng, points.len(), count).into_iter().map(|i| points[i].clone()).collect()
            }
            _ => (0..count).map(|_| self.sample(rng)).collect(),
        }
    }
}

fn uniform_cube<R: Rng + ?Sized>(dim: usize, half_width: f64, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-half_width..=half_width)).collect()
}

/// Componentwise clamp onto `[−1, 1]^m`.
pub fn box_project(y: &[f64]) -> Vec<f64> {
    y.iter().map(|v| v.clamp(-1.0, 1.0)).collect()
}

/// `y / max(1, ‖y‖)`.
pub fn ball_project(y: &[f64]) -> Vec<f64> {
    let n = norm(y).max(1.0);
    y.iter().map(|v| v / n).collect()
}
