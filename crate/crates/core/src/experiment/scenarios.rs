//! Seeded synthetic regression problems with targets in a constraint set.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constraints::{ball_project, box_project, ConstraintSet, CurveSpec, PARAM_MAX, PARAM_MIN};
use crate::error::{config, Result};
use crate::numerics::Matrix;
use crate::training::Dataset;

/// Input dimension of the sphere scenario.
pub const SPHERE_INPUT_DIM: usize = 1000;

const CONVEX_SCALE: f64 = 1.5;
const CURVE_INPUT_HALF_WIDTH: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Sphere,
    Square,
    Disk,
    Rose,
    Variety,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [Self::Sphere, Self::Square, Self::Disk, Self::Rose, Self::Variety];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Square => "square",
            Self::Disk => "disk",
            Self::Rose => "rose",
            Self::Variety => "variety",
        }
    }

    /// Default standard deviation of the noise added to training outputs.
    pub fn default_noise_std(self) -> f64 {
        match self {
            Self::Rose | Self::Variety => 0.1f64.sqrt(),
            _ => 0.0,
        }
    }

    pub fn is_planar(self) -> bool {
        !matches!(self, Self::Sphere)
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| config(format!("unknown scenario `{s}`")))
    }
}

/// `x ↦ Σ(a z² + b z + c)` with `z = A x`, where
/// `Σ(u) = (cos u₁ sin u₂, sin u₁ sin u₂, cos u₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereMap {
    pub projection: Matrix,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SphereMap {
    pub fn random<R: Rng + ?Sized>(input_dim: usize, rng: &mut R) -> Self {
        let data = (0..2 * input_dim).map(|_| rng.sample(StandardNormal)).collect();
        let projection = Matrix::from_vec(2, input_dim, data).expect("2 × n");
        let (a, b, c) = (rng.random(), rng.random(), rng.random());
        Self { projection, a, b, c }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let z = self.projection.mul_vec(x);
        let u: Vec<f64> = z.iter().map(|v| self.a * v * v + self.b * v + self.c).collect();
        let (s1, c1) = u[0].sin_cos();
        let (s2, c2) = u[1].sin_cos();
        vec![c1 * s2, s1 * s2, c2]
    }
}

/// `x ↦ P_K(1.5 R_θ x)` for the square or the disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexMap {
    pub theta: f64,
    pub disk: bool,
}

impl ConvexMap {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let (s, c) = self.theta.sin_cos();
        let y = [CONVEX_SCALE * (c * x[0] - s * x[1]), CONVEX_SCALE * (s * x[0] + c * x[1])];
        if self.disk {
            ball_project(&y)
        } else {
            box_project(&y)
        }
    }
}

/// `x ↦ ρ(clamp(Σ_i β_i xⁱ))` for a quintic with coefficients `β`, clamped to
/// the curve's parameter domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMap {
    pub coefficients: [f64; 6],
    pub curve: CurveSpec,
}

impl CurveMap {
    pub fn parameter(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, b| acc * x + b).clamp(PARAM_MIN, PARAM_MAX)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.curve.eval(self.parameter(x[0])).expect("clamped parameter").to_vec()
    }
}

/// The ground-truth map of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetFn {
    Sphere(SphereMap),
    Convex(ConvexMap),
    Curve(CurveMap),
}

impl TargetFn {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Sphere(f) => f.eval(x),
            Self::Convex(f) => f.eval(x),
            Self::Curve(f) => f.eval(x),
        }
    }
}

/// Training data (possibly noisy), clean test data, the constraint set and
/// the map that generated them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub set: ConstraintSet,
    pub target: TargetFn,
    pub train: Dataset,
    pub test: Dataset,
}

/// Sizes and noise of a generated scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioSize {
    pub train: usize,
    pub test: usize,
    pub noise_std: f64,
}

fn build<R, F>(
    kind: ScenarioKind,
    set: ConstraintSet,
    target: TargetFn,
    size: ScenarioSize,
    mut draw_input: F,
    rng: &mut R,
) -> Result<Scenario>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Vec<f64>,
{
    if size.train == 0 || size.test == 0 {
        return Err(config("train and test sizes must be at least 1"));
    }
    if !(size.noise_std >= 0.0 && size.noise_std.is_finite()) {
        return Err(config("noise standard deviation must be finite and non-negative"));
    }
    let noise = Normal::new(0.0, size.noise_std).expect("validated std");
    let mut sample = |count: usize, noisy: bool, rng: &mut R| -> Result<Dataset> {
        let inputs: Vec<Vec<f64>> = (0..count).map(|_| draw_input(rng)).collect();
        let outputs = inputs
            .iter()
            .map(|x| {
                let mut y = target.eval(x);
                if noisy && size.noise_std > 0.0 {
                    y.iter_mut().for_each(|v| *v += noise.sample(rng));
                }
                y
            })
            .collect();
        Dataset::new(inputs, outputs)
    };
    let train = sample(size.train, true, rng)?;
    let test = sample(size.test, false, rng)?;
    Ok(Scenario { kind, set, target, train, test })
}

/// Inputs uniform on `[0, 1]^1000`, outputs on the unit sphere.
pub fn gen_sphere_scenario<R: Rng + ?Sized>(rng: &mut R, size: ScenarioSize) -> Result<Scenario> {
    let map = SphereMap::random(SPHERE_INPUT_DIM, rng);
    sphere_scenario_with(map, rng, size)
}

/// Sphere scenario for a given map.
pub fn sphere_scenario_with<R: Rng + ?Sized>(map: SphereMap, rng: &mut R, size: ScenarioSize) -> Result<Scenario> {
    let n = map.projection.cols();
    build(
        ScenarioKind::Sphere,
        ConstraintSet::sphere(),
        TargetFn::Sphere(map),
        size,
        |r: &mut R| (0..n).map(|_| r.random::<f64>()).collect(),
        rng,
    )
}

/// Inputs uniform on `[−1, 1]²`, outputs `P_K(1.5 R_θ x)` with `θ ~ U[0, 2π]`.
pub fn gen_convex_scenario<R: Rng + ?Sized>(kind: ScenarioKind, rng: &mut R, size: ScenarioSize) -> Result<Scenario> {
    let (set, disk) = match kind {
        ScenarioKind::Square => (ConstraintSet::square(), false),
        ScenarioKind::Disk => (ConstraintSet::disk(), true),
        other => return Err(config(format!("{} is not a convex scenario", other.name()))),
    };
    let map = ConvexMap { theta: rng.random_range(0.0..TAU), disk };
    build(
        kind,
        set,
        TargetFn::Convex(map),
        size,
        |r: &mut R| vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)],
        rng,
    )
}

/// Inputs uniform on `[−10, 10]`, outputs on a rose or a random variety
/// through a random quintic; training outputs carry Gaussian noise.
pub fn gen_nonconvex_scenario<R: Rng + ?Sized>(
    kind: ScenarioKind,
    rng: &mut R,
    size: ScenarioSize,
) -> Result<Scenario> {
    let curve = match kind {
        ScenarioKind::Rose => CurveSpec::rose(),
        ScenarioKind::Variety => CurveSpec::random_variety(rng),
        other => return Err(config(format!("{} is not a curve scenario", other.name()))),
    };
    let mut coefficients = [0.0; 6];
    coefficients.iter_mut().for_each(|b| *b = rng.sample(StandardNormal));
    curve_scenario_with(kind, CurveMap { coefficients, curve }, rng, size)
}

/// Curve scenario for a given map.
pub fn curve_scenario_with<R: Rng + ?Sized>(
    kind: ScenarioKind,
    map: CurveMap,
    rng: &mut R,
    size: ScenarioSize,
) -> Result<Scenario> {
    let set = ConstraintSet::curve(map.curve.clone());
    build(
        kind,
        set,
        TargetFn::Curve(map),
        size,
        |r: &mut R| vec![r.random_range(-CURVE_INPUT_HALF_WIDTH..CURVE_INPUT_HALF_WIDTH)],
        rng,
    )
}

/// Any scenario by kind.
pub fn generate_scenario<R: Rng + ?Sized>(kind: ScenarioKind, rng: &mut R, size: ScenarioSize) -> Result<Scenario> {
    match kind {
        ScenarioKind::Sphere => gen_sphere_scenario(rng, size),
        ScenarioKind::Square | ScenarioKind::Disk => gen_convex_scenario(kind, rng, size),
        ScenarioKind::Rose | ScenarioKind::Variety => gen_nonconvex_scenario(kind, rng, size),
    }
}
