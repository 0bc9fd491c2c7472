use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Negative slope of the piecewise-linear endpoint of the family.
pub const LEAKY_SLOPE: f64 = 0.01;

/// Member `σ_α = (1−α)·leaky_relu + α·swish` of a continuous activation
/// family interpolating a piecewise-linear map (`α = 0`) and a smooth
/// non-polynomial one (`α = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SwishLike {
    alpha: f64,
}

impl SwishLike {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(domain(format!("activation parameter {alpha} outside [0, 1]")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn eval(self, t: f64) -> f64 {
        let leaky = if t > 0.0 { t } else { LEAKY_SLOPE * t };
        if self.alpha == 0.0 {
            return leaky;
        }
        (1.0 - self.alpha) * leaky + self.alpha * t * sigmoid(t)
    }

    pub fn derivative(self, t: f64) -> f64 {
        let leaky = if t > 0.0 { 1.0 } else { LEAKY_SLOPE };
        if self.alpha == 0.0 {
            return leaky;
        }
        let s = sigmoid(t);
        (1.0 - self.alpha) * leaky + self.alpha * (s + t * s * (1.0 - s))
    }
}

impl TryFrom<f64> for SwishLike {
    type Error = crate::Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<SwishLike> for f64 {
    fn from(a: SwishLike) -> f64 {
        a.alpha
    }
}

/// `σ_α(t)`; fails when `α ∉ [0, 1]`.
pub fn activation(alpha: f64, t: f64) -> Result<f64> {
    Ok(SwishLike::new(alpha)?.eval(t))
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}
