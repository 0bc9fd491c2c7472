//! Finitely supported probability measures and the operations that turn
//! attention logits into measures over constraint-set particles.

mod frechet;

pub use frechet::{frechet_mean, frechet_objective, FrechetOptions};

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::error::{domain, Result};
use crate::numerics::{dist, softmax};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// `Σ_i w_i δ_{a_i}`. Atoms are stored densely, duplicates included, so
/// atom `i` always corresponds to the same particle index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct DiscreteMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = crate::Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        Self::new(raw.atoms, raw.weights)
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(domain("a measure needs at least one atom"));
        }
        if atoms.len() != weights.len() {
            return Err(domain("atom and weight counts differ"));
        }
        let m = atoms[0].len();
        if atoms.iter().any(|a| a.len() != m) {
            return Err(domain("atoms must share one dimension"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(domain("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms, weights })
    }

    pub fn dirac(y: Vec<f64>) -> Self {
        Self { atoms: vec![y], weights: vec![1.0] }
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.atoms.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// Condition on the atoms satisfying `keep`; `None` when no mass is left.
    pub fn restrict(&self, keep: impl Fn(&[f64]) -> bool) -> Option<Self> {
        let (atoms, weights): (Vec<_>, Vec<_>) =
            self.iter().filter(|(a, w)| *w > 0.0 && keep(a)).map(|(a, w)| (a.to_vec(), w)).unzip();
        let total: f64 = weights.iter().sum();
        (total > 0.0).then(|| Self { atoms, weights: weights.into_iter().map(|w| w / total).collect() })
    }

    /// Largest `d_K` over the atoms.
    pub fn max_distance_to(&self, set: &ConstraintSet) -> Result<f64> {
        self.atoms.iter().try_fold(0.0f64, |acc, a| Ok(acc.max(set.distance(a)?)))
    }
}

/// `N × Q × m` array of particles `Y_{n,q}`, all members of one constraint
/// set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParticles")]
pub struct ParticleArray {
    n: usize,
    q: usize,
    m: usize,
    data: Vec<f64>,
}

#[derive(Deserialize)]
struct RawParticles {
    n: usize,
    q: usize,
    m: usize,
    data: Vec<f64>,
}

impl TryFrom<RawParticles> for ParticleArray {
    type Error = crate::Error;

    fn try_from(raw: RawParticles) -> Result<Self> {
        if raw.n == 0 || raw.q == 0 || raw.m == 0 || raw.data.len() != raw.n * raw.q * raw.m {
            return Err(domain("particle array shape does not match its data"));
        }
        Ok(Self { n: raw.n, q: raw.q, m: raw.m, data: raw.data })
    }
}

impl ParticleArray {
    /// `rows[n][q]` is particle `Y_{n,q}`.
    pub fn new(rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = rows.len();
        let q = rows.first().map_or(0, Vec::len);
        let m = rows.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if n == 0 || q == 0 || m == 0 {
            return Err(domain("particle array dimensions must be positive"));
        }
        if rows.iter().any(|r| r.len() != q || r.iter().any(|p| p.len() != m)) {
            return Err(domain("particle array is ragged"));
        }
        Ok(Self { n, q, m, data: rows.into_iter().flatten().flatten().collect() })
    }

    /// Like [`ParticleArray::new`], additionally checking every particle
    /// against `set`.
    pub fn in_set(rows: Vec<Vec<Vec<f64>>>, set: &ConstraintSet) -> Result<Self> {
        let arr = Self::new(rows)?;
        arr.check_membership(set)?;
        Ok(arr)
    }

    pub fn check_membership(&self, set: &ConstraintSet) -> Result<()> {
        for n in 0..self.n {
            for q in 0..self.q {
                let d = set.distance(self.get(n, q))?;
                if d > set.tolerance() {
                    return Err(domain(format!("particle ({n}, {q}) lies {d:e} away from the constraint set")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, n: usize, q: usize) -> &[f64] {
        let off = (n * self.q + q) * self.m;
        &self.data[off..off + self.m]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m)
    }

    /// `Ȳ_n = (1/Q) Σ_q Y_{n,q}`.
    pub fn row_means(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|n| {
                let mut mean = vec![0.0; self.m];
                for q in 0..self.q {
                    for (acc, v) in mean.iter_mut().zip(self.get(n, q)) {
                        *acc += v;
                    }
                }
                mean.iter_mut().for_each(|v| *v /= self.q as f64);
                mean
            })
            .collect()
    }

    /// `D_n = (1/Q) Σ_q ‖y − Y_{n,q}‖` for every `n`.
    pub fn mean_distances(&self, y: &[f64]) -> Vec<f64> {
        (0..self.n).map(|n| (0..self.q).map(|q| dist(self.get(n, q), y)).sum::<f64>() / self.q as f64).collect()
    }
}

/// `(1/Q) Σ_n Σ_q Softmax_N(w)_n δ_{Y_{n,q}}`; atom `(n, q)` sits at index
/// `n·Q + q`.
pub fn p_attention(w: &[f64], particles: &ParticleArray) -> Result<DiscreteMeasure> {
    if w.len() != particles.n() {
        return Err(domain(format!("{} logits for {} particle rows", w.len(), particles.n())));
    }
    let probs = softmax(w)?;
    let q = particles.q();
    let atoms = particles.iter().map(<[f64]>::to_vec).collect();
    let weights = probs.iter().flat_map(|p| std::iter::repeat_n(p / q as f64, q)).collect();
    Ok(DiscreteMeasure { atoms, weights })
}

/// `Σ_i w_i a_i`.
pub fn expectation(mu: &DiscreteMeasure) -> Vec<f64> {
    let mut mean = vec![0.0; mu.dim()];
    for (a, w) in mu.iter() {
        for (acc, v) in mean.iter_mut().zip(a) {
            *acc += w * v;
        }
    }
    mean
}

/// `W₁(μ, δ_y) = Σ_i w_i ‖a_i − y‖`: against a point mass the only
/// transport plan moves every atom to `y`.
pub fn w1_to_pointmass(mu: &DiscreteMeasure, y: &[f64]) -> Result<f64> {
    if y.len() != mu.dim() {
        return Err(domain(format!("point of dimension {} for a measure in dimension {}", y.len(), mu.dim())));
    }
    Ok(mu.iter().map(|(a, w)| w * dist(a, y)).sum())
}

/// Index of the heaviest atom, lowest index on ties.
pub fn mode_index(mu: &DiscreteMeasure) -> usize {
    mu.weights.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &w)| if w > best.1 { (i, w) } else { best }).0
}

/// The heaviest atom.
pub fn mode(mu: &DiscreteMeasure) -> Vec<f64> {
    mu.atoms[mode_index(mu)].clone()
}
