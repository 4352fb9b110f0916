#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use qprior::born::DensityOperator;
use qprior::hilbert::{ComplexMatrix, HermitianOperator, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn complex_gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<C64> {
    DMatrix::from_fn(r, c, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let g = complex_gaussian(rng, n, n);
    let h = (&g + g.adjoint()) * Complex::new(0.5, 0.0);
    HermitianOperator::new(ComplexMatrix::new(h).unwrap()).unwrap()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(complex_gaussian(rng, n, n).qr().q()).unwrap()
}

/// `U diag(values) U^H` for a random unitary `U`.
pub fn operator_with_spectrum(rng: &mut ChaCha8Rng, values: &[f64]) -> HermitianOperator {
    let n = values.len();
    let u = random_unitary(rng, n).into_matrix();
    let d = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(values[r], 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let a = &u * d * u.adjoint();
    let a = (&a + a.adjoint()) * Complex::new(0.5, 0.0);
    HermitianOperator::new(ComplexMatrix::new(a).unwrap()).unwrap()
}

/// Random operator whose eigenvalues come from a few integer levels, so
/// degenerate eigenspaces are common.
pub fn degenerate_operator(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let levels = rng.random_range(1..=n);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
    operator_with_spectrum(rng, &values)
}

/// `B B^H / trace`, optionally of reduced rank.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityOperator {
    let rank = rng.random_range(1..=n);
    let b = complex_gaussian(rng, n, rank);
    let m = &b * b.adjoint();
    let t = m.trace().re;
    let m = m / Complex::new(t, 0.0);
    let m = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
    DensityOperator::new(ComplexMatrix::new(m).unwrap()).unwrap()
}

pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(g h)(x) = g(h(x))`.
fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

/// Permutation made of one random cycle on a random subset of the points.
fn random_cycle(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let len = rng.random_range(1..=n);
    let points: Vec<usize> = rand::seq::index::sample(rng, n, len).into_vec();
    let mut p: Vec<usize> = (0..n).collect();
    for (i, &x) in points.iter().enumerate() {
        p[x] = points[(i + 1) % len];
    }
    p
}

/// Closure of `gens` under composition, or `None` above `cap` elements.
pub fn close_under_composition(n: usize, gens: &[Vec<usize>], cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut elements = vec![(0..n).collect::<Vec<usize>>()];
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let next = compose(g, &elements[i]);
            if !elements.contains(&next) {
                if elements.len() == cap {
                    return None;
                }
                elements.push(next);
            }
        }
        i += 1;
    }
    Some(elements)
}

/// A group of at most `max_order` permutations of `n` points, generated by
/// one or two random cycles.
pub fn random_small_group(rng: &mut ChaCha8Rng, n: usize, max_order: usize) -> Vec<Vec<usize>> {
    loop {
        let k = rng.random_range(1..=2);
        let gens: Vec<Vec<usize>> = (0..k).map(|_| random_cycle(rng, n)).collect();
        if let Some(g) = close_under_composition(n, &gens, max_order) {
            return g;
        }
    }
}

/// Exhaustive check of `z(x1) = z(x2) => z(g x1) = z(g x2)`.
pub fn permissible_by_triple_loop(elements: &[Vec<usize>], z: &[usize]) -> bool {
    let n = z.len();
    for g in elements {
        for x1 in 0..n {
            for x2 in 0..n {
                if z[x1] == z[x2] && z[g[x1]] != z[g[x2]] {
                    return false;
                }
            }
        }
    }
    true
}

/// Finest coarsening of the level sets of `z` that is permissible.
pub fn permissible_coarsening(elements: &[Vec<usize>], z: &[usize]) -> Vec<usize> {
    let n = z.len();
    let mut label: Vec<usize> = z.to_vec();
    loop {
        let mut changed = false;
        for g in elements {
            for x1 in 0..n {
                for x2 in 0..n {
                    if label[x1] == label[x2] && label[g[x1]] != label[g[x2]] {
                        let (keep, drop) = (label[g[x1]], label[g[x2]]);
                        for l in label.iter_mut() {
                            if *l == drop {
                                *l = keep;
                            }
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
}
