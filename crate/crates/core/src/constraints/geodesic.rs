//! Geodesic structure used by the Fréchet readout.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};
use crate::numerics::{dot, norm};

/// Unit-norm tolerance for points handed to sphere operations.
pub const SPHERE_NORM_TOL: f64 = 1e-9;

const SPREAD_SLACK: f64 = 1e-12;

/// Exponential/logarithm maps and intrinsic distance of a Riemannian
/// submanifold of `ℝ^m`.
pub trait GeodesicSpace: Sync {
    fn dist(&self, a: &[f64], b: &[f64]) -> Result<f64>;

    /// Tangent vector at `base` pointing along the minimizing geodesic to
    /// `y`, with length `dist(base, y)`.
    fn log(&self, base: &[f64], y: &[f64]) -> Result<Vec<f64>>;

    fn exp(&self, base: &[f64], v: &[f64]) -> Result<Vec<f64>>;

    /// Map an ambient point onto the space, if that is well defined.
    fn retract(&self, p: &[f64]) -> Option<Vec<f64>>;

    /// Fail unless the points lie in a common region where the Fréchet
    /// mean is unique.
    fn check_spread(&self, points: &[&[f64]]) -> Result<()>;
}

/// Flat `ℝ^m`: geodesics are straight lines.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl GeodesicSpace for Euclidean {
    fn dist(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        same_len(a, b)?;
        Ok(crate::numerics::dist(a, b))
    }

    fn log(&self, base: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        same_len(base, y)?;
        Ok(y.iter().zip(base).map(|(a, b)| a - b).collect())
    }

    fn exp(&self, base: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        same_len(base, v)?;
        Ok(base.iter().zip(v).map(|(a, b)| a + b).collect())
    }

    fn retract(&self, p: &[f64]) -> Option<Vec<f64>> {
        Some(p.to_vec())
    }

    fn check_spread(&self, _points: &[&[f64]]) -> Result<()> {
        Ok(())
    }
}

/// The unit sphere `S^{m−1} ⊂ ℝ^m` with its great-circle metric.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitSphere;

impl GeodesicSpace for UnitSphere {
    fn dist(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        sphere_dist(a, b)
    }

    fn log(&self, base: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        sphere_log(base, y)
    }

    fn exp(&self, base: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        sphere_exp(base, v)
    }

    fn retract(&self, p: &[f64]) -> Option<Vec<f64>> {
        let n = norm(p);
        (n > 1e-12 && n.is_finite()).then(|| p.iter().map(|v| v / n).collect())
    }

    /// Pairwise distances of at most `π/2` keep every atom inside a geodesic
    /// ball well within the injectivity radius, where the mean is unique.
    fn check_spread(&self, points: &[&[f64]]) -> Result<()> {
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                let d = sphere_dist(a, b)?;
                if d > FRAC_PI_2 + SPREAD_SLACK {
                    return Err(Error::GeodesicBall(format!(
                        "two atoms are {d:.6} rad apart; every pair must be within π/2"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(domain(format!("dimension mismatch: {} vs {}", a.len(), b.len())));
    }
    Ok(())
}

fn check_unit(p: &[f64]) -> Result<()> {
    let n = norm(p);
    if (n - 1.0).abs() > SPHERE_NORM_TOL {
        return Err(domain(format!("point with norm {n} is not on the unit sphere")));
    }
    Ok(())
}

/// Component of `y` orthogonal to `base`, and `⟨base, y⟩`.
fn tangent_part(base: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let c = dot(base, y);
    (y.iter().zip(base).map(|(yi, bi)| yi - c * bi).collect(), c)
}

/// Great-circle distance `arccos⟨u, v⟩`, evaluated as
/// `atan2(‖v − ⟨u,v⟩u‖, ⟨u,v⟩)` for accuracy at small and large angles.
pub fn sphere_dist(u: &[f64], v: &[f64]) -> Result<f64> {
    same_len(u, v)?;
    check_unit(u)?;
    check_unit(v)?;
    let (perp, c) = tangent_part(u, v);
    Ok(norm(&perp).atan2(c.clamp(-1.0, 1.0)))
}

pub fn sphere_log(base: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    same_len(base, y)?;
    check_unit(base)?;
    check_unit(y)?;
    let (perp, c) = tangent_part(base, y);
    let s = norm(&perp);
    let theta = s.atan2(c);
    if c < 0.0 && s < 1e-12 {
        return Err(Error::DegenerateGeodesic("logarithm of an antipodal point".into()));
    }
    if s == 0.0 {
        return Ok(vec![0.0; base.len()]);
    }
    Ok(perp.iter().map(|p| p * theta / s).collect())
}

pub fn sphere_exp(base: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    same_len(base, v)?;
    check_unit(base)?;
    let theta = norm(v);
    if theta == 0.0 {
        return Ok(base.to_vec());
    }
    let (s, c) = theta.sin_cos();
    let p: Vec<f64> = base.iter().zip(v).map(|(b, vi)| c * b + s * vi / theta).collect();
    let n = norm(&p);
    Ok(p.into_iter().map(|x| x / n).collect())
}
