//! Random instances with a known number of relevant components.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::reduction::{ReductionError, RegressionPopulation};

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// signs of `R`'s diagonal absorbed).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, p: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..p {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

fn random_gamma<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let g = rng.random_range(0.5..2.0);
    if rng.random_bool(0.5) {
        g
    } else {
        -g
    }
}

/// A population whose `beta` has exactly `m` relevant components.
///
/// Eigenvalues lie in `[0.5, 5.5]`. With `degenerate`, eigenvalues are drawn
/// from fewer distinct levels than `p`, so some eigenspaces have dimension
/// above one; `beta` then has a random direction inside each chosen
/// eigenspace.
pub fn planted_population<R: Rng + ?Sized>(
    rng: &mut R,
    p: usize,
    m: usize,
    degenerate: bool,
    sigma2: f64,
) -> Result<RegressionPopulation, ReductionError> {
    if m > p {
        return Err(ReductionError::KOutOfRange { k: m, max: p });
    }
    let n_levels = if degenerate {
        rng.random_range(m.max(1)..=p)
    } else {
        p
    };
    let spacing = 5.0 / n_levels as f64;
    let levels: Vec<f64> = (0..n_levels)
        .map(|k| 0.5 + spacing * (k as f64 + rng.random_range(0.0..0.5)))
        .collect();
    // Every level is used at least once.
    let mut assignment: Vec<usize> = (0..p).map(|i| if i < n_levels { i } else { rng.random_range(0..n_levels) }).collect();
    for i in (1..p).rev() {
        assignment.swap(i, rng.random_range(0..=i));
    }
    let q = random_orthogonal(rng, p);
    let lambda = DVector::from_iterator(p, assignment.iter().map(|&l| levels[l]));
    let sigma = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    let sigma = (&sigma + sigma.transpose()) * 0.5;

    let mut beta = DVector::zeros(p);
    for level in sample(rng, n_levels, m) {
        let cols: Vec<usize> = (0..p).filter(|&i| assignment[i] == level).collect();
        let mut dir = DVector::zeros(p);
        for &c in &cols {
            dir += q.column(c) * rng.sample::<f64, _>(StandardNormal);
        }
        let norm = dir.norm();
        beta += dir / norm * random_gamma(rng);
    }
    RegressionPopulation::new(sigma, beta, sigma2)
}

/// Draws `n` rows `x ~ N(0, Sigma_x)` and `y = x . beta + N(0, sigma2)`.
pub fn sample_population<R: Rng + ?Sized>(
    rng: &mut R,
    pop: &RegressionPopulation,
    n: usize,
) -> (DMatrix<f64>, DVector<f64>) {
    let p = pop.p();
    let l = pop
        .sigma_x()
        .clone()
        .cholesky()
        .expect("population covariance is positive definite")
        .l();
    let z = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x = z * l.transpose();
    let sd = pop.sigma2().sqrt();
    let y = DVector::from_fn(n, |r, _| {
        x.row(r).transpose().dot(pop.beta()) + sd * rng.sample::<f64, _>(StandardNormal)
    });
    (x, y)
}

/// Gaussian design `x` (`n x p`) and a `beta` built from `m` eigenvectors of
/// the centered sample covariance, so the sample moments satisfy the
/// `m`-component hypothesis exactly.
pub fn planted_sample<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: usize,
    m: usize,
) -> (DMatrix<f64>, DVector<f64>) {
    let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let means: Vec<f64> = (0..p).map(|c| x.column(c).mean()).collect();
    let xc = DMatrix::from_fn(n, p, |r, c| x[(r, c)] - means[c]);
    let s = xc.tr_mul(&xc) / n as f64;
    let eig = SymmetricEigen::new(s);
    let mut beta = DVector::zeros(p);
    for j in sample(rng, p, m.min(p)) {
        beta += eig.eigenvectors.column(j) * random_gamma(rng);
    }
    (x, beta)
}
