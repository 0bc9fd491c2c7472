use proptest::prelude::*;
use ptrans_core::constraints::{sphere_exp, UnitSphere};
use ptrans_core::measures::{expectation, frechet_mean, frechet_objective, mode, p_attention, w1_to_pointmass};
use ptrans_core::numerics::{dist, norm};
use ptrans_core::{DiscreteMeasure, FrechetOptions, ParticleArray};

fn particles() -> impl Strategy<Value = ParticleArray> {
    (1usize..8, 1usize..4, 1usize..4).prop_flat_map(|(n, q, m)| {
        prop::collection::vec(prop::collection::vec(prop::collection::vec(-3.0..3.0f64, m), q), n)
            .prop_map(|rows| ParticleArray::new(rows).unwrap())
    })
}

fn attention_case() -> impl Strategy<Value = (Vec<f64>, ParticleArray)> {
    particles().prop_flat_map(|p| (prop::collection::vec(-20.0..20.0f64, p.n()), Just(p)))
}

fn measure(dim: usize) -> impl Strategy<Value = DiscreteMeasure> {
    (1usize..7).prop_flat_map(move |k| {
        (prop::collection::vec(prop::collection::vec(-3.0..3.0f64, dim), k), prop::collection::vec(0.01..1.0f64, k))
            .prop_map(|(atoms, w)| {
                let s: f64 = w.iter().sum();
                DiscreteMeasure::new(atoms, w.into_iter().map(|v| v / s).collect()).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn attention_is_a_probability_measure_on_the_particles((w, p) in attention_case()) {
        let mu = p_attention(&w, &p).unwrap();
        prop_assert_eq!(mu.len(), p.n() * p.q());
        prop_assert!(mu.weights().iter().all(|&x| x >= 0.0));
        prop_assert!((mu.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (atom, particle) in mu.atoms().iter().zip(p.iter()) {
            prop_assert_eq!(atom.as_slice(), particle);
        }
    }

    #[test]
    fn attention_weights_are_shift_invariant((w, p) in attention_case(), c in -50.0..50.0f64) {
        let shifted: Vec<f64> = w.iter().map(|v| v + c).collect();
        let (a, b) = (p_attention(&w, &p).unwrap(), p_attention(&shifted, &p).unwrap());
        for (x, y) in a.weights().iter().zip(b.weights()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn w1_to_pointmass_bounds_the_mean_gap(mu in measure(2), y in prop::collection::vec(-3.0..3.0f64, 2)) {
        let w1 = w1_to_pointmass(&mu, &y).unwrap();
        prop_assert!(w1 >= 0.0);
        prop_assert!(dist(&expectation(&mu), &y) <= w1 + 1e-12);
    }

    #[test]
    fn w1_to_pointmass_is_one_lipschitz_in_the_target(
        mu in measure(2),
        y in prop::collection::vec(-3.0..3.0f64, 2),
        z in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let (a, b) = (w1_to_pointmass(&mu, &y).unwrap(), w1_to_pointmass(&mu, &z).unwrap());
        prop_assert!((a - b).abs() <= dist(&y, &z) + 1e-12);
    }

    #[test]
    fn point_mass_has_zero_distance_to_its_atom(y in prop::collection::vec(-3.0..3.0f64, 3)) {
        let mu = DiscreteMeasure::dirac(y.clone());
        prop_assert_eq!(w1_to_pointmass(&mu, &y).unwrap(), 0.0);
        prop_assert_eq!(expectation(&mu), y.clone());
        prop_assert_eq!(mode(&mu), y);
    }

    #[test]
    fn mode_is_a_heaviest_atom(mu in measure(2)) {
        let m = mode(&mu);
        let heaviest = mu.weights().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(mu.iter().any(|(a, w)| a == m.as_slice() && w == heaviest));
    }

    #[test]
    fn sphere_frechet_mean_stays_on_the_sphere_and_beats_every_atom(
        tangents in prop::collection::vec((-0.5..0.5f64, -0.5..0.5f64), 1..7),
        raw in prop::collection::vec(0.01..1.0f64, 7),
    ) {
        let north = [0.0, 0.0, 1.0];
        let atoms: Vec<Vec<f64>> = tangents.iter().map(|&(u, v)| sphere_exp(&north, &[u, v, 0.0]).unwrap()).collect();
        let w = &raw[..atoms.len()];
        let s: f64 = w.iter().sum();
        let mu = DiscreteMeasure::new(atoms, w.iter().map(|v| v / s).collect()).unwrap();
        let k = frechet_mean(&mu, &UnitSphere, FrechetOptions::default()).unwrap();
        prop_assert!((norm(&k) - 1.0).abs() <= 1e-12);
        let f = frechet_objective(&mu, &UnitSphere, &k).unwrap();
        for a in mu.atoms() {
            prop_assert!(f <= frechet_objective(&mu, &UnitSphere, a).unwrap() + 1e-12);
        }
    }
}

#[test]
fn invalid_measures_are_rejected() {
    assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![0.5]).is_err());
    assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![1.5, -0.5]).is_err());
    assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0, 2.0]], vec![0.5, 0.5]).is_err());
    assert!(p_attention(&[0.0, 1.0], &ParticleArray::new(vec![vec![vec![0.0]]]).unwrap()).is_err());
}

#[test]
fn widely_spread_sphere_measure_is_rejected() {
    let mu = DiscreteMeasure::new(vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]], vec![0.5, 0.5]).unwrap();
    assert!(frechet_mean(&mu, &UnitSphere, FrechetOptions::default()).is_err());
}
