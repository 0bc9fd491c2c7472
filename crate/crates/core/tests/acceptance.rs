//! Acceptance suite: one `PASS`/`FAIL` line per criterion.
//!
//! Failing criteria are reported but only turn into a non-zero exit status
//! when `ACCEPTANCE_STRICT=1` is set, so the full workspace test run stays
//! green while still recording which criteria are unmet.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::FRAC_PI_4;
use std::time::{Duration, Instant};

use ptrans_core::constraints::{Euclidean, GeodesicSpace, UnitSphere};
use ptrans_core::experiment::{
    run_benchmark, summarize, write_metrics, BenchmarkOutcome, ExperimentConfig, MetricsRow, ScenarioKind, SummaryRow,
    MLP, P_TRANSFORMER, TRANSFORMER,
};
use ptrans_core::measures::{expectation, frechet_mean, p_attention, w1_to_pointmass, FrechetOptions};
use ptrans_core::numerics::{dist, dot, norm};
use ptrans_core::rng::seeded;
use ptrans_core::training::wasserstein_loss_and_grad;
use ptrans_core::{ConstraintSet, DenseNet, DiscreteMeasure, ParticleArray, ProbabilisticTransformer};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

struct Run {
    outcome: BenchmarkOutcome,
    summary: Vec<SummaryRow>,
    elapsed: Duration,
}

impl Run {
    fn new(kind: ScenarioKind) -> Run {
        let start = Instant::now();
        let outcome = run_benchmark(&ExperimentConfig::default_for(kind)).expect("benchmark run");
        let summary = summarize(&outcome.rows);
        Run { outcome, summary, elapsed: start.elapsed() }
    }

    fn model(&self, name: &str) -> &SummaryRow {
        self.summary.iter().find(|r| r.model == name).expect("model row")
    }

    fn rows<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a MetricsRow> {
        self.outcome.rows.iter().filter(move |r| r.model == name)
    }

    fn max(&self, name: &str, f: impl Fn(&MetricsRow) -> f64) -> f64 {
        self.rows(name).map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    fn complete(&self) -> bool {
        self.outcome.failed_seeds == 0
    }

    fn mse_ratio(&self, name: &str) -> f64 {
        self.model(name).mse_mean / self.model(MLP).mse_mean
    }
}

fn criterion_1(sphere: &Run) -> Verdict {
    let atom_err = sphere.max(P_TRANSFORMER, |r| r.max_support_dk);
    let d_k = sphere.model(P_TRANSFORMER).d_k_mean;
    let secs = sphere.elapsed.as_secs_f64();
    verdict(
        sphere.complete() && atom_err < 1e-12 && d_k < 1e-9 && secs < 300.0,
        format!("max |‖atom‖−1| = {atom_err:.2e}, mean d_K = {d_k:.2e}, runtime {secs:.1} s"),
    )
}

fn criterion_2(sphere: &Run) -> Verdict {
    let (p, mlp, t) = (sphere.model(P_TRANSFORMER), sphere.model(MLP), sphere.model(TRANSFORMER));
    let ratio = sphere.mse_ratio(P_TRANSFORMER);
    let pass =
        p.d_k_mean < 1e-9 && mlp.d_k_mean > 1e-3 && t.d_k_mean > mlp.d_k_mean && t.d_k_mean > 0.1 && ratio <= 3.0;
    verdict(
        pass,
        format!(
            "d_K p-transformer {:.2e}, mlp {:.3}, transformer {:.3}; p-transformer MSE ratio {ratio:.2}",
            p.d_k_mean, mlp.d_k_mean, t.d_k_mean
        ),
    )
}

fn criterion_3(runs: &[(ScenarioKind, Run)]) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (kind, run) in runs {
        let attn_dk = run.max(TRANSFORMER, |r| r.d_k).max(run.max(P_TRANSFORMER, |r| r.d_k));
        let mlp_dk = run.model(MLP).d_k_mean;
        let (rt, rp) = (run.mse_ratio(TRANSFORMER), run.mse_ratio(P_TRANSFORMER));
        let in_range = |r: f64| (1.0..=20.0).contains(&r);
        pass &= run.complete() && attn_dk <= 1e-9 && mlp_dk > 1e-4 && in_range(rt) && in_range(rp);
        detail.push(format!(
            "{}: attention d_K ≤ {attn_dk:.1e}, mlp d_K {mlp_dk:.1e}, MSE ratios {rt:.2} / {rp:.2}",
            kind.name()
        ));
    }
    verdict(pass, detail.join("; "))
}

fn criterion_4(runs: &[(ScenarioKind, Run)]) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (kind, run) in runs {
        let p_dk = run.max(P_TRANSFORMER, |r| r.d_k);
        let (mlp, t) = (run.model(MLP).d_k_mean, run.model(TRANSFORMER).d_k_mean);
        pass &= run.complete() && p_dk <= 1e-4 && mlp > 0.05 && t > 0.05;
        detail.push(format!("{}: p-transformer d_K ≤ {p_dk:.1e}, mlp {mlp:.3}, transformer {t:.3}", kind.name()));
    }
    verdict(pass, detail.join("; "))
}

fn reference_softmax(w: &[f64]) -> Vec<f64> {
    let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

fn random_particles<R: Rng>(rng: &mut R, n: usize, q: usize, m: usize) -> ParticleArray {
    let rows =
        (0..n).map(|_| (0..q).map(|_| (0..m).map(|_| rng.random_range(-2.0..2.0)).collect()).collect()).collect();
    ParticleArray::new(rows).unwrap()
}

fn criterion_5() -> Verdict {
    let mut rng = seeded(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (n, q, m) = (rng.random_range(1..=16), rng.random_range(1..=4), rng.random_range(1..=4));
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let particles = random_particles(&mut rng, n, q, m);
        let mean = expectation(&p_attention(&w, &particles).unwrap());
        let probs = reference_softmax(&w);
        for (j, got) in mean.iter().enumerate() {
            let want: f64 =
                (0..n).map(|i| probs[i] * (0..q).map(|k| particles.get(i, k)[j]).sum::<f64>() / q as f64).sum();
            worst = worst.max((got - want).abs());
        }
    }
    verdict(worst < 1e-12, format!("max deviation {worst:.2e} over 1000 cases"))
}

/// `∫ |F_μ(t) − 1{t ≥ y}| dt` by composite trapezoid quadrature over a grid
/// refining every interval between breakpoints; each panel uses the one-sided
/// limits of the step functions so the rule is exact between jumps.
fn cdf_quadrature_w1(atoms: &[f64], weights: &[f64], y: f64) -> f64 {
    let mut knots: Vec<f64> = atoms.iter().copied().chain([y]).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let cdf = |t: f64, inclusive: bool| -> f64 {
        let f: f64 =
            atoms.iter().zip(weights).filter(|(a, _)| if inclusive { **a <= t } else { **a < t }).map(|(_, w)| w).sum();
        let g = if inclusive { f64::from(u8::from(y <= t)) } else { f64::from(u8::from(y < t)) };
        (f - g).abs()
    };
    let mut total = 0.0;
    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let panels = 16;
        let h = (b - a) / panels as f64;
        for k in 0..panels {
            let (l, r) = (a + h * k as f64, a + h * (k + 1) as f64);
            let fl = cdf(l, true);
            let fr = if k + 1 == panels { cdf(b, false) } else { cdf(r, true) };
            total += 0.5 * h * (fl + fr);
        }
    }
    total
}

/// Transport problem between `a` and `b` solved by visiting every vertex of
/// its polytope. Bases are spanning trees of the bipartite row/column graph
/// stored as cell bitmasks, explored from the northwest-corner basis through
/// simplex pivots.
struct TransportLp<'a> {
    a: &'a [f64],
    b: &'a [f64],
    cost: Vec<f64>,
}

impl TransportLp<'_> {
    fn cells(&self) -> usize {
        self.a.len() * self.b.len()
    }

    /// Flows of the basis, if it is a spanning tree with a feasible solution.
    fn solve(&self, basis: u64) -> Option<Vec<f64>> {
        let n = self.b.len();
        let (mut ra, mut rb) = (self.a.to_vec(), self.b.to_vec());
        let mut active: Vec<usize> = (0..self.cells()).filter(|c| basis >> c & 1 == 1).collect();
        let (mut row_deg, mut col_deg) = (vec![0; ra.len()], vec![0; n]);
        for &c in &active {
            row_deg[c / n] += 1;
            col_deg[c % n] += 1;
        }
        let mut flow = vec![0.0; self.cells()];
        while !active.is_empty() {
            let leaf = active.iter().position(|&c| row_deg[c / n] == 1 || col_deg[c % n] == 1)?;
            let c = active.swap_remove(leaf);
            let (i, j) = (c / n, c % n);
            let x = if row_deg[i] == 1 { ra[i] } else { rb[j] };
            row_deg[i] -= 1;
            col_deg[j] -= 1;
            flow[c] = x;
            ra[i] -= x;
            rb[j] -= x;
        }
        let balanced = ra.iter().chain(&rb).all(|r| r.abs() < 1e-12);
        let feasible = flow.iter().all(|&x| x >= -1e-12);
        (balanced && feasible).then_some(flow)
    }

    fn northwest_corner(&self) -> u64 {
        let n = self.b.len();
        let (mut ra, mut rb) = (self.a.to_vec(), self.b.to_vec());
        let (mut i, mut j, mut basis) = (0, 0, 0u64);
        while i < self.a.len() && j < n {
            basis |= 1 << (i * n + j);
            let x = ra[i].min(rb[j]);
            ra[i] -= x;
            rb[j] -= x;
            if i + 1 == self.a.len() {
                j += 1;
            } else if j + 1 == n || ra[i] <= rb[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        basis
    }

    /// Basis reached by letting `inn` enter: it closes one cycle in the tree,
    /// and the ratio test over the cycle's decreasing cells picks the leaver.
    fn pivot(&self, basis: u64, tree: &[usize], flow: &[f64], inn: usize) -> u64 {
        let (m, n) = (self.a.len(), self.b.len());
        // Tree nodes: rows `0..m`, columns `m..m + n`.
        let mut via = vec![None; m + n];
        let mut queue = VecDeque::from([inn / n]);
        let mut reached = vec![false; m + n];
        reached[inn / n] = true;
        while let Some(v) = queue.pop_front() {
            for &c in tree {
                let (r, col) = (c / n, m + c % n);
                let other = if v == r {
                    col
                } else if v == col {
                    r
                } else {
                    continue;
                };
                if !reached[other] {
                    reached[other] = true;
                    via[other] = Some((c, v));
                    queue.push_back(other);
                }
            }
        }
        let (mut node, mut decreasing, mut leaver) = (m + inn % n, true, (f64::INFINITY, inn));
        while let Some((c, prev)) = via[node] {
            if decreasing && flow[c] < leaver.0 {
                leaver = (flow[c], c);
            }
            decreasing = !decreasing;
            node = prev;
        }
        basis & !(1 << leaver.1) | 1 << inn
    }

    fn min_over_vertices(&self) -> f64 {
        let start = self.northwest_corner();
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut best = f64::INFINITY;
        while let Some(basis) = queue.pop_front() {
            let flow = self.solve(basis).expect("pivots keep the basis feasible");
            best = best.min(flow.iter().zip(&self.cost).map(|(x, c)| x * c).sum());
            let tree: Vec<usize> = (0..self.cells()).filter(|c| basis >> c & 1 == 1).collect();
            for inn in (0..self.cells()).filter(|c| basis >> c & 1 == 0) {
                let next = self.pivot(basis, &tree, &flow, inn);
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        best
    }
}

fn random_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn criterion_6() -> Verdict {
    let mut rng = seeded(6);
    let mut quad_err = 0.0f64;
    for _ in 0..1000 {
        let k = rng.random_range(1..=20);
        let atoms: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
        let weights = random_simplex(&mut rng, k);
        let y = rng.random_range(-4.0..4.0);
        let mu = DiscreteMeasure::new(atoms.iter().map(|a| vec![*a]).collect(), weights.clone()).unwrap();
        let closed = w1_to_pointmass(&mu, &[y]).unwrap();
        quad_err = quad_err.max((closed - cdf_quadrature_w1(&atoms, &weights, y)).abs());
    }

    let mut lp_err = 0.0f64;
    let mut bound_slack = f64::INFINITY;
    for trial in 0..250 {
        let m = rng.random_range(1..=3);
        let k = rng.random_range(1..=6);
        let atoms: Vec<Vec<f64>> = (0..k).map(|_| (0..m).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let weights = random_simplex(&mut rng, k);
        let mu = DiscreteMeasure::new(atoms.clone(), weights.clone()).unwrap();
        let mean = expectation(&mu);
        if trial % 5 != 0 {
            let y: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let cost = atoms.iter().map(|a| dist(a, &y)).collect();
            let w1 = TransportLp { a: &weights, b: &[1.0], cost }.min_over_vertices();
            lp_err = lp_err.max((w1 - w1_to_pointmass(&mu, &y).unwrap()).abs());
            bound_slack = bound_slack.min(w1 - dist(&y, &mean));
        } else {
            let l = rng.random_range(1..=6);
            let other: Vec<Vec<f64>> = (0..l).map(|_| (0..m).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
            let other_w = random_simplex(&mut rng, l);
            let nu = DiscreteMeasure::new(other.clone(), other_w.clone()).unwrap();
            let cost = atoms.iter().flat_map(|a| other.iter().map(|b| dist(a, b))).collect();
            let w1 = TransportLp { a: &weights, b: &other_w, cost }.min_over_vertices();
            bound_slack = bound_slack.min(w1 - dist(&mean, &expectation(&nu)));
        }
    }
    verdict(
        quad_err < 1e-6 && lp_err < 1e-6 && bound_slack > -1e-6,
        format!("quadrature gap {quad_err:.2e}, LP gap {lp_err:.2e}, min W₁ − ‖mean gap‖ {bound_slack:.2e}"),
    )
}

fn random_model<R: Rng>(rng: &mut R, alpha: f64) -> ProbabilisticTransformer {
    let (d, latent, n, q) =
        (rng.random_range(1..=4), rng.random_range(1..=3), rng.random_range(1..=6), rng.random_range(1..=3));
    let encoder = DenseNet::random(&[d, 5, latent], alpha, rng).unwrap();
    let head = DenseNet::random(&[latent, 4, n], alpha, rng).unwrap();
    let set = ConstraintSet::disk();
    let rows = (0..n).map(|_| (0..q).map(|_| set.sample(rng)).collect()).collect();
    let particles = ParticleArray::in_set(rows, &set).unwrap();
    ProbabilisticTransformer::new(encoder, head, particles, set).unwrap()
}

fn random_batch<R: Rng>(rng: &mut R, model: &ProbabilisticTransformer) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let b = rng.random_range(1..=8);
    let inputs = (0..b).map(|_| (0..model.input_dim()).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let outputs = (0..b).map(|_| (0..2).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
    (inputs, outputs)
}

fn criterion_7() -> Verdict {
    let mut rng = seeded(7);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let model = random_model(&mut rng, [0.0, 0.5, 1.0][i % 3]);
        let (inputs, outputs) = random_batch(&mut rng, &model);
        let (loss, _) = wasserstein_loss_and_grad(&model, &inputs, &outputs).unwrap();
        let direct: f64 = inputs
            .iter()
            .zip(&outputs)
            .map(|(x, y)| w1_to_pointmass(&model.predict_measure(x).unwrap(), y).unwrap())
            .sum();
        worst = worst.max((loss - direct).abs());
    }
    verdict(worst < 1e-12, format!("max deviation {worst:.2e} over 100 batches"))
}

const FD_STEP: f64 = 1e-5;

fn central_difference(params: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..params.len())
        .map(|i| {
            p[i] = params[i] + FD_STEP;
            let up = f(&p);
            p[i] = params[i] - FD_STEP;
            let down = f(&p);
            p[i] = params[i];
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a).max(norm(b)).max(1e-300)
}

fn criterion_8() -> Verdict {
    let mut rng = seeded(8);
    let (mut net_err, mut loss_err) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let alpha = [0.0, 0.5, 1.0][i % 3];
        let dims: Vec<usize> = (0..rng.random_range(2..=4)).map(|_| rng.random_range(1..=5)).collect();
        let net = DenseNet::random(&dims, alpha, &mut rng).unwrap();
        let x: Vec<f64> = (0..dims[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c: Vec<f64> = (0..net.output_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, tape) = net.forward(&x).unwrap();
        let analytic = net.backward(&tape, &c).unwrap().flatten();
        let numeric = central_difference(&net.params(), |p| {
            let mut probe = net.clone();
            probe.set_params(p).unwrap();
            dot(&probe.predict(&x).unwrap(), &c)
        });
        net_err = net_err.max(relative_error(&analytic, &numeric));

        let model = random_model(&mut rng, alpha);
        let (inputs, outputs) = random_batch(&mut rng, &model);
        let (_, grad) = wasserstein_loss_and_grad(&model, &inputs, &outputs).unwrap();
        let analytic: Vec<f64> = grad.encoder.flatten().into_iter().chain(grad.head.flatten()).collect();
        let split = model.encoder().param_count();
        let params: Vec<f64> = model.encoder().params().into_iter().chain(model.head().params()).collect();
        let numeric = central_difference(&params, |p| {
            let (mut enc, mut head) = (model.encoder().clone(), model.head().clone());
            enc.set_params(&p[..split]).unwrap();
            head.set_params(&p[split..]).unwrap();
            let probe =
                ProbabilisticTransformer::new(enc, head, model.particles().clone(), model.constraint_set().clone())
                    .unwrap();
            wasserstein_loss_and_grad(&probe, &inputs, &outputs).unwrap().0
        });
        loss_err = loss_err.max(relative_error(&analytic, &numeric));
    }
    verdict(
        net_err < 1e-5 && loss_err < 1e-5,
        format!("max relative error: network {net_err:.2e}, Wasserstein loss {loss_err:.2e}"),
    )
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 1e-3 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Orthonormal basis of the tangent plane at `c`.
fn tangent_basis(c: &[f64]) -> [Vec<f64>; 2] {
    let pick = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&pick, c);
    let e1: Vec<f64> = pick.iter().zip(c).map(|(p, ci)| p - d * ci).collect();
    let n1 = norm(&e1);
    let e1: Vec<f64> = e1.iter().map(|v| v / n1).collect();
    let e2 = vec![c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]];
    [e1, e2]
}

/// Minimizer of the Fréchet objective over `exp_c(u e1 + v e2)` for grid
/// points `(u, v)` of spacing `h` within `radius` of the origin.
fn grid_argmin(mu: &DiscreteMeasure, c: &[f64], radius: f64, h: f64) -> Vec<f64> {
    let [e1, e2] = tangent_basis(c);
    let steps = (radius / h).ceil() as i64;
    let mut best = (f64::INFINITY, c.to_vec());
    for i in -steps..=steps {
        for j in -steps..=steps {
            let (u, v) = (i as f64 * h, j as f64 * h);
            if u.hypot(v) > radius {
                continue;
            }
            let tangent: Vec<f64> = (0..3).map(|k| u * e1[k] + v * e2[k]).collect();
            let p = UnitSphere.exp(c, &tangent).unwrap();
            let f: f64 = mu.iter().map(|(a, w)| w * UnitSphere.dist(&p, a).unwrap().powi(2)).sum();
            if f < best.0 {
                best = (f, p);
            }
        }
    }
    best.1
}

fn criterion_9() -> Verdict {
    let mut rng = seeded(9);
    let mut sphere_gap = 0.0f64;
    for _ in 0..50 {
        let centre = random_unit(&mut rng);
        let [e1, e2] = tangent_basis(&centre);
        let k = rng.random_range(1..=8);
        let atoms: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let r = FRAC_PI_4 * rng.random::<f64>().sqrt();
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let t: Vec<f64> = (0..3).map(|i| r * (phi.cos() * e1[i] + phi.sin() * e2[i])).collect();
                UnitSphere.exp(&centre, &t).unwrap()
            })
            .collect();
        let mu = DiscreteMeasure::new(atoms, random_simplex(&mut rng, k)).unwrap();
        let mean = frechet_mean(&mu, &UnitSphere, FrechetOptions::default()).unwrap();
        let coarse = grid_argmin(&mu, &centre, FRAC_PI_4, 1e-2);
        let fine = grid_argmin(&mu, &coarse, 5e-2, 1e-3);
        sphere_gap = sphere_gap.max(UnitSphere.dist(&mean, &fine).unwrap());
    }

    let mut point_masses_exact = true;
    for _ in 0..20 {
        let a = random_unit(&mut rng);
        let mean = frechet_mean(&DiscreteMeasure::dirac(a.clone()), &UnitSphere, FrechetOptions::default()).unwrap();
        point_masses_exact &= mean == a;
    }

    let mut flat_gap = 0.0f64;
    for _ in 0..50 {
        let (k, m) = (rng.random_range(1..=8), rng.random_range(1..=4));
        let atoms: Vec<Vec<f64>> = (0..k).map(|_| (0..m).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let weights = random_simplex(&mut rng, k);
        let want: Vec<f64> = (0..m).map(|j| atoms.iter().zip(&weights).map(|(a, w)| w * a[j]).sum()).collect();
        let mu = DiscreteMeasure::new(atoms, weights).unwrap();
        let got = frechet_mean(&mu, &Euclidean, FrechetOptions::default()).unwrap();
        flat_gap = flat_gap.max(dist(&got, &want));
    }
    verdict(
        sphere_gap < 2e-3 && point_masses_exact && flat_gap < 1e-12,
        format!(
            "sphere gap to grid {sphere_gap:.2e} rad, point masses exact: {point_masses_exact}, Euclidean gap {flat_gap:.2e}"
        ),
    )
}

fn criterion_10(first: &Run) -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_metrics(&a, &first.outcome.rows).expect("write metrics");
    let second = Run::new(ScenarioKind::Rose);
    write_metrics(&b, &second.outcome.rows).expect("write metrics");
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    verdict(a == b, format!("rose metrics.csv, {} bytes per run", a.len()))
}

fn report(id: usize, v: &Verdict) -> bool {
    println!("criterion {id:>2}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    v.pass
}

fn main() {
    let mut results = vec![
        report(5, &criterion_5()),
        report(6, &criterion_6()),
        report(7, &criterion_7()),
        report(8, &criterion_8()),
        report(9, &criterion_9()),
    ];

    let sphere = Run::new(ScenarioKind::Sphere);
    results.push(report(1, &criterion_1(&sphere)));
    results.push(report(2, &criterion_2(&sphere)));
    drop(sphere);

    let convex: Vec<_> = [ScenarioKind::Square, ScenarioKind::Disk].into_iter().map(|k| (k, Run::new(k))).collect();
    results.push(report(3, &criterion_3(&convex)));

    let curves: Vec<_> = [ScenarioKind::Rose, ScenarioKind::Variety].into_iter().map(|k| (k, Run::new(k))).collect();
    results.push(report(4, &criterion_4(&curves)));
    results.push(report(10, &criterion_10(&curves[0].1)));

    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
