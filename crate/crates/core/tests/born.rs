mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use qprior::born::*;
use qprior::hilbert::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state(seed: u64, n: usize) -> (ChaCha8Rng, DensityOperator, SpectralDecomposition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = random_density(&mut rng, n);
    let s = spectral_decompose(&degenerate_operator(&mut rng, n)).unwrap();
    (rng, rho, s)
}

fn random_channel(rng: &mut ChaCha8Rng, inputs: usize) -> Channel {
    let nz = rng.random_range(1..=5);
    let z: Vec<f64> = (0..nz).map(|k| k as f64 - 1.0).collect();
    let rows = (0..inputs).map(|_| random_distribution(rng, nz)).collect();
    Channel::new(z, rows).unwrap()
}

fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a * b).trace().re
}

#[test]
fn projectors_onto_point_sets() {
    let s = SpectralDecomposition::diagonal(&[-1.0, 0.0, 2.0]).unwrap();
    let rho = density_from_distribution(&s, &[0.2, 0.3, 0.5]).unwrap();
    let pi = projector_onto(&s, &ValueSet::Points(vec![-1.0, 2.0]));
    assert!((born_probability(&rho, &pi).unwrap() - 0.7).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partition_probabilities_sum_to_one(seed in any::<u64>(), n in 1usize..=16, blocks in 1usize..=4) {
        let (mut rng, rho, s) = state(seed, n);
        let labels: Vec<usize> = (0..s.len()).map(|_| rng.random_range(0..blocks)).collect();
        let total: f64 = (0..blocks)
            .map(|b| {
                let points: Vec<f64> = s.eigenvalues().iter().zip(&labels).filter(|(_, &l)| l == b).map(|(&u, _)| u).collect();
                born_probability(&rho, &projector_onto(&s, &ValueSet::Points(points))).unwrap()
            })
            .sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn probabilities_are_unitarily_covariant(seed in any::<u64>(), n in 1usize..=16) {
        let (mut rng, rho, s) = state(seed, n);
        let j = rng.random_range(0..s.len());
        let pi = ComplexMatrix::new(s.projectors()[j].clone()).unwrap();
        let w = random_unitary(&mut rng, n);
        let wm = w.as_matrix();
        let pi_w = ComplexMatrix::new(wm.adjoint() * pi.as_matrix() * wm).unwrap();
        let before = born_probability(&rho, &pi).unwrap();
        let after = born_probability(&rho.conjugate(&w).unwrap(), &pi_w).unwrap();
        prop_assert!((before - after).abs() <= 1e-10);
    }

    #[test]
    fn commuting_state_reduces_to_classical_mixture(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = spectral_decompose(&degenerate_operator(&mut rng, n)).unwrap();
        let p = random_distribution(&mut rng, s.len());
        let rho = density_from_distribution(&s, &p).unwrap();
        prop_assert!(rho.commutes_with(&s, 1e-10));
        let q = random_channel(&mut rng, s.len());
        let dist = data_distribution(&rho, &s, &q).unwrap();
        for (k, d) in dist.iter().enumerate() {
            let classical: f64 = p.iter().zip(q.rows()).map(|(pi, row)| pi * row[k]).sum();
            prop_assert!((d - classical).abs() <= 1e-10);
        }
    }

    #[test]
    fn data_distribution_is_the_trace_rule_on_effects(seed in any::<u64>(), n in 1usize..=12) {
        let (mut rng, rho, s) = state(seed, n);
        let q = random_channel(&mut rng, s.len());
        let effects = data_effects(&s, &q).unwrap();
        let dist = data_distribution(&rho, &s, &q).unwrap();
        let mut sum = DMatrix::<C64>::zeros(n, n);
        for (e, d) in effects.iter().zip(&dist) {
            prop_assert!((trace_of_product(rho.as_matrix(), e.operator.as_matrix()) - d).abs() <= 1e-10);
            sum += e.operator.as_matrix();
        }
        prop_assert!(max_abs(&(sum - DMatrix::<C64>::identity(n, n))) <= 1e-10);
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let z_mean: f64 = q.z_values().iter().zip(&dist).map(|(z, d)| z * d).sum();
        prop_assert!((expectation(&rho, &data_operator(&s, &q).unwrap()).unwrap() - z_mean).abs() <= 1e-9);
    }

    #[test]
    fn expectation_of_projector_is_probability(seed in any::<u64>(), n in 1usize..=16) {
        let (mut rng, rho, s) = state(seed, n);
        let j = rng.random_range(0..s.len());
        let pi = ComplexMatrix::new(s.projectors()[j].clone()).unwrap();
        let as_operator = HermitianOperator::new(pi.clone()).unwrap();
        let e = expectation(&rho, &as_operator).unwrap();
        prop_assert!((e - born_probability(&rho, &pi).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn likelihood_effects_are_bounded(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = spectral_decompose(&degenerate_operator(&mut rng, n)).unwrap();
        let lik: Vec<f64> = (0..s.len()).map(|_| rng.random_range(0.0..=1.0)).collect();
        let effect = likelihood_effect(&s, &lik, "z").unwrap();
        prop_assert!(effect.is_bounded().unwrap());
        let spectrum = spectral_decompose(&effect.operator).unwrap();
        prop_assert!(spectrum.eigenvalues()[0] >= -1e-12);
        prop_assert!(*spectrum.eigenvalues().last().unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn transition_probability_is_born_probability_of_pure_state(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = complex_gaussian(&mut rng, n, 1);
        let b = complex_gaussian(&mut rng, n, 1);
        let u = StateVector::normalized(a.column(0).into_owned()).unwrap();
        let v = StateVector::normalized(b.column(0).into_owned()).unwrap();
        let t = transition_probability(&u, &v).unwrap();
        let rho = DensityOperator::pure(&u);
        let pi = ComplexMatrix::new(v.projector()).unwrap();
        prop_assert!((t - born_probability(&rho, &pi).unwrap()).abs() <= 1e-12);
        let overlap = u.inner(&v).unwrap();
        prop_assert!((t - (overlap * overlap.conj()).re).abs() <= 1e-12);
    }
}
