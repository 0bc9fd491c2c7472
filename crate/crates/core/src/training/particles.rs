//! Particle selection and nearest-particle labels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::measures::ParticleArray;
use crate::numerics::sq_dist;

/// Absolute slack under which two anchor distances count as tied.
pub const LABEL_TIE_TOL: f64 = 1e-12;

const LLOYD_ITERATIONS: usize = 20;

/// `T × N` indicator matrix: entry `(t, n)` is 1 when anchor `n` is among
/// the nearest anchors to output `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelMatrix {
    n: usize,
    data: Vec<f64>,
}

impl LabelMatrix {
    pub fn rows(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.n..(t + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

/// Label every output with the anchors at minimal distance, ties included.
pub fn make_labels(outputs: &[Vec<f64>], anchors: &[Vec<f64>]) -> Result<LabelMatrix> {
    if anchors.is_empty() {
        return Err(config("labels need at least one anchor"));
    }
    let m = anchors[0].len();
    if anchors.iter().chain(outputs).any(|p| p.len() != m) {
        return Err(domain("outputs and anchors must share a dimension"));
    }
    let n = anchors.len();
    let mut data = Vec::with_capacity(outputs.len() * n);
    for y in outputs {
        let d: Vec<f64> = anchors.iter().map(|a| sq_dist(a, y).sqrt()).collect();
        let best = d.iter().copied().fold(f64::INFINITY, f64::min);
        data.extend(d.iter().map(|&v| if v <= best + LABEL_TIE_TOL { 1.0 } else { 0.0 }));
    }
    Ok(LabelMatrix { n, data })
}

/// For each anchor, its `q` nearest pool members (Euclidean, ties by pool
/// index).
pub fn gather_particles(pool: &[Vec<f64>], anchors: &[Vec<f64>], q: usize) -> Result<ParticleArray> {
    if q == 0 || q > pool.len() {
        return Err(config(format!("cannot take {q} particles from a pool of {}", pool.len())));
    }
    let rows = anchors
        .iter()
        .map(|a| {
            let mut order: Vec<(f64, usize)> = pool.iter().enumerate().map(|(i, p)| (sq_dist(p, a), i)).collect();
            order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            order[..q].iter().map(|&(_, i)| pool[i].clone()).collect()
        })
        .collect();
    ParticleArray::new(rows)
}

/// `k` distinct pool members covering the pool: k-means++ seeding, Lloyd
/// iterations, then each centre snapped to its nearest pool member not yet
/// taken by an earlier centre.
pub fn kmeans_anchors<R: Rng + ?Sized>(pool: &[Vec<f64>], k: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if k == 0 || k > pool.len() {
        return Err(config(format!("cannot pick {k} anchors from a pool of {}", pool.len())));
    }
    let mut centers = kmeanspp_seed(pool, k, rng);
    let m = pool[0].len();
    let mut assign = vec![0usize; pool.len()];
    for _ in 0..LLOYD_ITERATIONS {
        for (a, p) in assign.iter_mut().zip(pool) {
            *a = nearest(&centers, p);
        }
        let mut sums = vec![vec![0.0; m]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assign.iter().zip(pool) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for ((c, s), &cnt) in centers.iter_mut().zip(sums).zip(&counts) {
            if cnt > 0 {
                *c = s.into_iter().map(|v| v / cnt as f64).collect();
            }
        }
    }
    let mut used = vec![false; pool.len()];
    Ok(centers
        .iter()
        .map(|c| {
            let i = (0..pool.len())
                .filter(|&i| !used[i])
                .min_by(|&i, &j| sq_dist(&pool[i], c).total_cmp(&sq_dist(&pool[j], c)).then(i.cmp(&j)))
                .expect("k ≤ pool size leaves a free member");
            used[i] = true;
            pool[i].clone()
        })
        .collect())
}

fn kmeanspp_seed<R: Rng + ?Sized>(pool: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centers = vec![pool[rng.random_range(0..pool.len())].clone()];
    let mut d2: Vec<f64> = pool.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = pool.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if r < w {
                    pick = i;
                    break;
                }
                r -= w;
            }
            pick
        } else {
            rng.random_range(0..pool.len())
        };
        centers.push(pool[next].clone());
        for (d, p) in d2.iter_mut().zip(pool) {
            *d = d.min(sq_dist(p, &pool[next]));
        }
    }
    centers
}

fn nearest(centers: &[Vec<f64>], p: &[f64]) -> usize {
    (0..centers.len()).min_by(|&i, &j| sq_dist(&centers[i], p).total_cmp(&sq_dist(&centers[j], p))).unwrap_or(0)
}

/// Anchors from [`kmeans_anchors`] and their `q` nearest pool members.
pub fn select_particles<R: Rng + ?Sized>(
    pool: &[Vec<f64>],
    n: usize,
    q: usize,
    rng: &mut R,
) -> Result<(Vec<Vec<f64>>, ParticleArray)> {
    if n == 0 || q == 0 || n * q > pool.len() {
        return Err(config(format!("N·Q = {}·{} must be positive and at most the pool size {}", n, q, pool.len())));
    }
    let anchors = kmeans_anchors(pool, n, rng)?;
    let particles = gather_particles(pool, &anchors, q)?;
    Ok((anchors, particles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn label_examples() {
        let anchors: Vec<Vec<f64>> = (0..5).map(|i| vec![f64::from(i), 0.0]).collect();
        let l = make_labels(&[vec![3.0, 0.0]], &anchors).unwrap();
        assert_eq!(l.row(0), &[0.0, 0.0, 0.0, 1.0, 0.0]);
        let tie = make_labels(&[vec![1.5, 0.0]], &anchors).unwrap();
        assert_eq!(tie.row(0), &[0.0, 1.0, 1.0, 0.0, 0.0]);
        let l = make_labels(&[vec![0.2]], &[vec![-1.0], vec![1.0]]).unwrap();
        assert_eq!(l.row(0), &[0.0, 1.0]);
        assert!(make_labels(&[vec![0.2]], &[]).is_err());
    }

    #[test]
    fn gather_sorts_by_distance() {
        let pool = vec![vec![0.0], vec![1.0], vec![10.0]];
        let y = gather_particles(&pool, &[vec![0.0]], 2).unwrap();
        assert_eq!(y.get(0, 0), &[0.0]);
        assert_eq!(y.get(0, 1), &[1.0]);
    }

    #[test]
    fn single_particle_rows_are_the_anchors() {
        let pool: Vec<Vec<f64>> = (0..30).map(|i| vec![f64::from(i).sin(), f64::from(i).cos()]).collect();
        let (anchors, y) = select_particles(&pool, 7, 1, &mut seeded(3)).unwrap();
        for (n, a) in anchors.iter().enumerate() {
            assert_eq!(y.get(n, 0), a.as_slice());
            assert!(pool.contains(a));
        }
    }

    #[test]
    fn full_selection_enumerates_the_pool() {
        let pool: Vec<Vec<f64>> = (0..12).map(|i| vec![f64::from(i * i % 7), f64::from(i)]).collect();
        let (anchors, _) = select_particles(&pool, 12, 1, &mut seeded(9)).unwrap();
        let mut got = anchors.clone();
        let mut want = pool.clone();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn oversized_request_is_a_config_error() {
        let pool = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert!(matches!(select_particles(&pool, 2, 2, &mut seeded(0)), Err(crate::Error::Config(_))));
    }

    #[test]
    fn selection_is_deterministic() {
        let pool: Vec<Vec<f64>> = (0..50).map(|i| vec![f64::from(i).sin() * 3.0]).collect();
        let a = select_particles(&pool, 5, 3, &mut seeded(4)).unwrap();
        let b = select_particles(&pool, 5, 3, &mut seeded(4)).unwrap();
        assert_eq!(a, b);
    }
}
