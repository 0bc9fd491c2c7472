use serde::{Deserialize, Serialize};

use super::{expectation, DiscreteMeasure};
use crate::constraints::GeodesicSpace;
use crate::error::{domain, Error, Result};
use crate::numerics::norm;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrechetOptions {
    pub max_iter: usize,
    pub step: f64,
    /// Stop once the Riemannian gradient norm falls below this.
    pub tol: f64,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        Self { max_iter: 200, step: 1.0, tol: 1e-10 }
    }
}

/// Minimizer of `k ↦ Σ_i w_i d_g(k, a_i)²` over the space, by Riemannian
/// gradient descent `x ← exp_x(step · Σ_i w_i log_x(a_i))` started from the
/// retracted extrinsic mean.
pub fn frechet_mean(mu: &DiscreteMeasure, space: &dyn GeodesicSpace, opts: FrechetOptions) -> Result<Vec<f64>> {
    if opts.step.is_nan() || opts.step <= 0.0 || opts.max_iter == 0 {
        return Err(domain("Fréchet options need a positive step and iteration budget"));
    }
    let support: Vec<&[f64]> = mu.iter().filter(|(_, w)| *w > 0.0).map(|(a, _)| a).collect();
    space.check_spread(&support)?;

    // A point mass (possibly repeated) is its own mean.
    if support.iter().all(|a| *a == support[0]) {
        return Ok(support[0].to_vec());
    }

    let mut x = space.retract(&expectation(mu)).unwrap_or_else(|| support[0].to_vec());
    let mut grad_norm = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let mut step_dir = vec![0.0; x.len()];
        for (a, w) in mu.iter() {
            if w == 0.0 {
                continue;
            }
            let v = space.log(&x, a)?;
            for (s, vi) in step_dir.iter_mut().zip(&v) {
                *s += w * vi;
            }
        }
        grad_norm = norm(&step_dir);
        if grad_norm < opts.tol {
            return Ok(x);
        }
        step_dir.iter_mut().for_each(|s| *s *= opts.step);
        x = space.exp(&x, &step_dir)?;
    }
    Err(Error::NotConverged { iterations: opts.max_iter, grad_norm })
}

/// `Σ_i w_i d_g(k, a_i)²`.
pub fn frechet_objective(mu: &DiscreteMeasure, space: &dyn GeodesicSpace, k: &[f64]) -> Result<f64> {
    mu.iter().try_fold(0.0, |acc, (a, w)| Ok(acc + w * space.dist(k, a)?.powi(2)))
}
