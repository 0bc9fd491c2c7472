//! Planar parametric curves used as non-convex constraint sets.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::Matrix;

/// Parameter domain shared by every curve.
pub const PARAM_MIN: f64 = -10.0;
pub const PARAM_MAX: f64 = 10.0;

/// Dense parameter grid used to estimate distances to a curve.
pub const REFERENCE_SAMPLES: usize = 100_001;

const MIN_ABS_DET: f64 = 0.1;
const HOMEOMORPHISM_LAYERS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveShape {
    /// `t ↦ (2cos²t + 1)·(cos(t/3), sin(t/3))`.
    Rose,
    /// `t ↦ Φ(sinc(t+1)·(cos(t/2), sin(t/2)))` for a random homeomorphism Φ.
    Variety,
}

/// Description of a curve; fully determines its points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub shape: CurveShape,
    /// Layers `z ↦ tanh(M z)` applied in order (variety only). Empty means
    /// the identity.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub homeomorphism: Vec<Matrix>,
}

impl CurveSpec {
    pub fn rose() -> Self {
        Self { shape: CurveShape::Rose, homeomorphism: Vec::new() }
    }

    pub fn variety(homeomorphism: Vec<Matrix>) -> Result<Self> {
        for m in &homeomorphism {
            match m.determinant_2x2() {
                Some(d) if d.abs() >= MIN_ABS_DET => {}
                _ => return Err(domain("homeomorphism layers must be 2x2 with |det| >= 0.1")),
            }
        }
        Ok(Self { shape: CurveShape::Variety, homeomorphism })
    }

    /// Variety with three random `tanh` layers; matrices have i.i.d.
    /// standard normal entries and are redrawn until `|det| ≥ 0.1`.
    pub fn random_variety<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let layers = (0..HOMEOMORPHISM_LAYERS)
            .map(|_| loop {
                let data: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
                let m = Matrix::from_vec(2, 2, data).expect("2x2");
                if m.determinant_2x2().is_some_and(|d| d.abs() >= MIN_ABS_DET) {
                    break m;
                }
            })
            .collect();
        Self { shape: CurveShape::Variety, homeomorphism: layers }
    }

    pub fn eval(&self, t: f64) -> Result<[f64; 2]> {
        if !(PARAM_MIN..=PARAM_MAX).contains(&t) {
            return Err(domain(format!("curve parameter {t} outside [{PARAM_MIN}, {PARAM_MAX}]")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> [f64; 2] {
        match self.shape {
            CurveShape::Rose => {
                let r = 2.0 * t.cos().powi(2) + 1.0;
                let (s, c) = (t / 3.0).sin_cos();
                [r * c, r * s]
            }
            CurveShape::Variety => {
                let r = sinc(t + 1.0);
                let (s, c) = (t / 2.0).sin_cos();
                self.apply_homeomorphism([r * c, r * s])
            }
        }
    }

    pub fn apply_homeomorphism(&self, mut z: [f64; 2]) -> [f64; 2] {
        for m in &self.homeomorphism {
            let v = m.mul_vec(&z);
            z = [v[0].tanh(), v[1].tanh()];
        }
        z
    }

    /// Inverse of [`CurveSpec::apply_homeomorphism`]; `None` when the point
    /// lies outside its image.
    pub fn invert_homeomorphism(&self, mut z: [f64; 2]) -> Option<[f64; 2]> {
        for m in self.homeomorphism.iter().rev() {
            if z.iter().any(|v| v.abs() >= 1.0) {
                return None;
            }
            let inv = m.inverse_2x2()?;
            let v = inv.mul_vec(&[z[0].atanh(), z[1].atanh()]);
            z = [v[0], v[1]];
        }
        Some(z)
    }
}

/// Unnormalized `sin(t)/t` with `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Point of the curve at parameter `t`.
pub fn curve_eval(spec: &CurveSpec, t: f64) -> Result<[f64; 2]> {
    spec.eval(t)
}

/// A curve together with its dense reference sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "CurveSpec", into = "CurveSpec")]
pub struct CurveSet {
    spec: CurveSpec,
    points: Vec<[f64; 2]>,
    resolution: f64,
}

impl PartialEq for CurveSet {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl From<CurveSpec> for CurveSet {
    fn from(spec: CurveSpec) -> Self {
        let points: Vec<[f64; 2]> = (0..REFERENCE_SAMPLES).map(|k| spec.eval_unchecked(param_at(k))).collect();
        let max_chord = points
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        Self { spec, points, resolution: 0.5 * max_chord }
    }
}

impl From<CurveSet> for CurveSpec {
    fn from(set: CurveSet) -> Self {
        set.spec
    }
}

fn param_at(k: usize) -> f64 {
    PARAM_MIN + (PARAM_MAX - PARAM_MIN) * k as f64 / (REFERENCE_SAMPLES - 1) as f64
}

impl CurveSet {
    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    /// Half the longest chord between consecutive reference points.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.spec.eval_unchecked(rng.random_range(PARAM_MIN..=PARAM_MAX)).to_vec()
    }

    /// Distance from `y` to the curve: nearest reference point, refined by a
    /// golden-section search over the two adjacent parameter cells.
    pub fn distance(&self, y: &[f64]) -> f64 {
        let d2 = |p: [f64; 2]| (p[0] - y[0]).powi(2) + (p[1] - y[1]).powi(2);
        let (best_k, best) = self
            .points
            .iter()
            .enumerate()
            .map(|(k, &p)| (k, d2(p)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        let lo = param_at(best_k.saturating_sub(1));
        let hi = param_at((best_k + 1).min(REFERENCE_SAMPLES - 1));
        let refined = golden_min(|t| d2(self.spec.eval_unchecked(t)), lo, hi);
        best.min(refined).sqrt()
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}
