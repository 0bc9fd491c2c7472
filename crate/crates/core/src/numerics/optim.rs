use serde::{Deserialize, Serialize};

use super::net::{DenseNet, GradientBundle};
use crate::error::{config, domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { kind: OptimizerKind::Adam, lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

impl OptimizerConfig {
    pub fn sgd(lr: f64) -> Self {
        Self { kind: OptimizerKind::Sgd, lr, ..Self::default() }
    }

    pub fn adam(lr: f64) -> Self {
        Self { kind: OptimizerKind::Adam, lr, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(config(format!("learning rate must be positive, got {}", self.lr)));
        }
        if self.kind == OptimizerKind::Adam {
            if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
                return Err(config("Adam betas must lie in [0, 1)"));
            }
            if self.eps <= 0.0 {
                return Err(config("Adam epsilon must be positive"));
            }
        }
        Ok(())
    }
}

/// Stateful first-order optimizer bound to one network shape.
#[derive(Clone, Debug)]
pub struct Optimizer {
    config: OptimizerConfig,
    t: u64,
    moments: Option<(Vec<f64>, Vec<f64>)>,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, t: 0, moments: None })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, net: &mut DenseNet, grads: &GradientBundle) -> Result<()> {
        if grads.layers.len() != net.depth() {
            return Err(domain("gradient bundle does not match the network"));
        }
        let n_params = net.param_count();
        let c = self.config;
        self.t += 1;
        match c.kind {
            OptimizerKind::Sgd => {
                for (l, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
                    if g.weights.as_slice().len() != l.weights.as_slice().len() || g.bias.len() != l.bias.len() {
                        return Err(domain("gradient bundle does not match the network"));
                    }
                    for (p, d) in l.weights.as_mut_slice().iter_mut().zip(g.weights.as_slice()) {
                        *p -= c.lr * d;
                    }
                    for (p, d) in l.bias.iter_mut().zip(&g.bias) {
                        *p -= c.lr * d;
                    }
                }
            }
            OptimizerKind::Adam => {
                let flat = grads.flatten();
                if flat.len() != n_params {
                    return Err(domain("gradient bundle does not match the network"));
                }
                let (m, v) = self.moments.get_or_insert_with(|| (vec![0.0; n_params], vec![0.0; n_params]));
                let t = self.t as i32;
                let bc1 = 1.0 - c.beta1.powi(t);
                let bc2 = 1.0 - c.beta2.powi(t);
                let mut params = net.params();
                for i in 0..n_params {
                    let g = flat[i];
                    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
                    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
                    let m_hat = m[i] / bc1;
                    let v_hat = v[i] / bc2;
                    params[i] -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
                }
                net.set_params(&params)?;
            }
        }
        Ok(())
    }
}
