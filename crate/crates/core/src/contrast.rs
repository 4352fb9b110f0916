//! Priors for the four-treatment contrast experiment.
//!
//! Four treatment effects `mu = (mu_a, mu_b, mu_c, mu_d)` define two
//! contrasts, `zeta_a = mu_a - (mu_b + mu_c + mu_d) / 3` and the analogous
//! `zeta_b`. Knowing `sign(zeta_a) = +1`, the quantum prior for
//! `sign(zeta_b) = +1` follows from the qubit Born rule as `(1 + a.b) / 2`
//! where `a`, `b` are the unit directions associated with the two contrasts.
//! The classical reference treats the effects as i.i.d. normal and computes
//! the conditional orthant probability of `(zeta_a, zeta_b)`, both in closed
//! form and by seeded Monte Carlo.
//!
//! For continuous contrasts the prior on `zeta_a` is discretized onto a grid
//! ([`GridPrior`]) and pushed through a caller-supplied unitary basis change.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::born::{
    born_probability, density_from_distribution, transition_probability, BornError,
    DensityOperator,
};
use crate::hilbert::{
    conjugate_by_unitary, projector_onto, spectral_decompose, ComplexMatrix, HermitianOperator,
    HilbertError, Interval, SpectralDecomposition, ValueSet, C64,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PriorError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Born(#[from] BornError),
    #[error("correlation {0} must lie strictly inside (-1, 1)")]
    CorrOutOfRange(f64),
    #[error("covariance matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("no Monte Carlo draw satisfied the conditioning event")]
    NoConditioningSamples,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid must be strictly ascending and finite")]
    GridNotAscending,
    #[error("direction {0:?} is not a unit vector")]
    NotUnitDirection([f64; 3]),
    #[error("basis change has dimension {got}, grid has {expected} points")]
    BasisDimension { expected: usize, got: usize },
    #[error("channel row {row} is not a conditional distribution")]
    NotConditionalDistribution { row: usize },
    #[error("invalid density: {0}")]
    BadDensity(String),
}

/// Hypothetical effects of treatments a, b, c and d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreatmentVector {
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_c: f64,
    pub mu_d: f64,
}

impl TreatmentVector {
    pub fn new(mu_a: f64, mu_b: f64, mu_c: f64, mu_d: f64) -> Self {
        Self {
            mu_a,
            mu_b,
            mu_c,
            mu_d,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.mu_a, self.mu_b, self.mu_c, self.mu_d]
    }

    pub fn from_array(mu: [f64; 4]) -> Self {
        Self::new(mu[0], mu[1], mu[2], mu[3])
    }
}

/// Rows are the coefficient vectors of `psi_0..psi_3`. The matrix is
/// symmetric and orthogonal, so it is its own inverse.
pub const PSI_TRANSFORM: [[f64; 4]; 4] = [
    [0.5, 0.5, 0.5, 0.5],
    [-0.5, -0.5, 0.5, 0.5],
    [-0.5, 0.5, -0.5, 0.5],
    [-0.5, 0.5, 0.5, -0.5],
];

fn apply_psi(v: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(PSI_TRANSFORM.iter()) {
        *o = row.iter().zip(v).map(|(c, x)| c * x).sum();
    }
    out
}

/// `(psi_0, psi_1, psi_2, psi_3)`; `psi_0` carries the common mean and the
/// other three span the contrasts.
pub fn psi_transform(mu: &TreatmentVector) -> [f64; 4] {
    apply_psi(mu.as_array())
}

pub fn inverse_psi_transform(psi: [f64; 4]) -> TreatmentVector {
    // PSI_TRANSFORM^T = PSI_TRANSFORM^{-1}
    let mut out = [0.0; 4];
    for (j, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|i| PSI_TRANSFORM[i][j] * psi[i]).sum();
    }
    TreatmentVector::from_array(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastPair {
    pub zeta_a: f64,
    pub zeta_b: f64,
}

/// Contrasts from the treatment effects directly.
pub fn contrasts(mu: &TreatmentVector) -> ContrastPair {
    ContrastPair {
        zeta_a: mu.mu_a - (mu.mu_b + mu.mu_c + mu.mu_d) / 3.0,
        zeta_b: mu.mu_b - (mu.mu_a + mu.mu_c + mu.mu_d) / 3.0,
    }
}

/// Contrasts through the rotated coordinates:
/// `zeta_a = -2/3 (psi_1 + psi_2 + psi_3)`, `zeta_b = -2/3 (psi_1 - psi_2 - psi_3)`.
pub fn contrasts_from_psi(psi: [f64; 4]) -> ContrastPair {
    ContrastPair {
        zeta_a: -2.0 / 3.0 * (psi[1] + psi[2] + psi[3]),
        zeta_b: -2.0 / 3.0 * (psi[1] - psi[2] - psi[3]),
    }
}

/// Two unit directions in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionPair {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl DirectionPair {
    pub fn new(a: [f64; 3], b: [f64; 3]) -> Result<Self, PriorError> {
        for v in [a, b] {
            let norm = Vector3::from(v).norm();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                return Err(PriorError::NotUnitDirection(v));
            }
        }
        Ok(Self { a, b })
    }

    /// Normalizes both vectors first.
    pub fn normalized(a: [f64; 3], b: [f64; 3]) -> Result<Self, PriorError> {
        let unit = |v: [f64; 3]| {
            let n = Vector3::from(v).norm();
            if n == 0.0 || !n.is_finite() {
                Err(PriorError::NotUnitDirection(v))
            } else {
                Ok([v[0] / n, v[1] / n, v[2] / n])
            }
        };
        Self::new(unit(a)?, unit(b)?)
    }

    /// `a = -(1,1,1)/sqrt 3`, `b = -(1,-1,-1)/sqrt 3`, so `a.b = -1/3`.
    pub fn treatment_example() -> Self {
        let s = 1.0 / 3f64.sqrt();
        Self {
            a: [-s, -s, -s],
            b: [-s, s, s],
        }
    }

    pub fn dot(&self) -> f64 {
        Vector3::from(self.a).dot(&Vector3::from(self.b))
    }
}

/// Spin operator `n . sigma` on the qubit space.
pub fn spin_operator(n: [f64; 3]) -> HermitianOperator {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(n[2], 0.0),
            C64::new(n[0], -n[1]),
            C64::new(n[0], n[1]),
            C64::new(-n[2], 0.0),
        ],
    );
    HermitianOperator::new(ComplexMatrix::new(m).expect("finite 2x2")).expect("Hermitian by construction")
}

/// Closed form `(1 + a.b) / 2`.
pub fn quantum_prior_binary(d: &DirectionPair) -> f64 {
    (0.5 * (1.0 + d.dot())).clamp(0.0, 1.0)
}

/// The same prior through the operator route: the `+1` eigenstate of the
/// `a`-spin, the `+1` eigenstate of the `b`-spin, and their transition
/// probability.
pub fn quantum_prior_binary_born(d: &DirectionPair) -> Result<f64, PriorError> {
    let up_a = plus_state(d.a)?;
    let up_b = plus_state(d.b)?;
    Ok(transition_probability(&up_a, &up_b)?)
}

fn plus_state(n: [f64; 3]) -> Result<crate::hilbert::StateVector, PriorError> {
    let s = spectral_decompose(&spin_operator(n))?;
    let j = s.index_of(1.0).ok_or(HilbertError::EigensolverFailure { dim: 2 })?;
    Ok(s.eigenvector(j).ok_or(HilbertError::EigensolverFailure { dim: 2 })?)
}

/// Unitary `W` with `W^H diag(-1, 1) W` equal to the `b`-spin written in the
/// eigenbasis of the `a`-spin (eigenvalues ascending).
pub fn qubit_basis_change(d: &DirectionPair) -> Result<ComplexMatrix, PriorError> {
    let eigenbasis = |n: [f64; 3]| -> Result<DMatrix<C64>, PriorError> {
        let s = spectral_decompose(&spin_operator(n))?;
        if s.len() != 2 {
            return Err(HilbertError::EigensolverFailure { dim: 2 }.into());
        }
        let mut u = DMatrix::<C64>::zeros(2, 2);
        u.set_column(0, &s.eigenspace_basis(0).column(0));
        u.set_column(1, &s.eigenspace_basis(1).column(0));
        Ok(u)
    };
    let ua = eigenbasis(d.a)?;
    let ub = eigenbasis(d.b)?;
    Ok(ComplexMatrix::new(ub.adjoint() * ua)?)
}

/// `P(Z_2 > 0 | Z_1 > 0)` for a standard bivariate normal with correlation
/// `corr`, from the orthant identity `P(Z_1 > 0, Z_2 > 0) = 1/4 + asin(corr) / (2 pi)`.
pub fn bayes_prior_analytic(corr: f64) -> Result<f64, PriorError> {
    if !(corr > -1.0 && corr < 1.0) {
        return Err(PriorError::CorrOutOfRange(corr));
    }
    Ok((0.25 + corr.asin() / (2.0 * PI)) / 0.5)
}

/// Joint covariance of `(zeta_a, zeta_b)` when the four effects are
/// independent standard normals.
pub fn treatment_contrast_covariance() -> [[f64; 2]; 2] {
    [[4.0 / 3.0, -4.0 / 9.0], [-4.0 / 9.0, 4.0 / 3.0]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Total draws.
    pub n: u64,
    /// Draws with `zeta_a > 0`.
    pub n_conditioning: u64,
    pub seed: u64,
    pub streams: u64,
}

pub const DEFAULT_STREAMS: u64 = 16;

/// Monte Carlo estimate of `P(zeta_b > 0 | zeta_a > 0)` for a zero-mean
/// bivariate normal with covariance `cov`.
pub fn bayes_prior_mc(cov: [[f64; 2]; 2], n: u64, seed: u64) -> Result<McEstimate, PriorError> {
    bayes_prior_mc_with_streams(cov, n, seed, DEFAULT_STREAMS)
}

/// As [`bayes_prior_mc`], splitting the `n` draws over `streams` independent
/// ChaCha substreams. The result depends only on `(cov, n, seed, streams)`.
pub fn bayes_prior_mc_with_streams(
    cov: [[f64; 2]; 2],
    n: u64,
    seed: u64,
    streams: u64,
) -> Result<McEstimate, PriorError> {
    if n == 0 {
        return Err(PriorError::NoSamples);
    }
    let l = cholesky2(cov)?;
    let streams = streams.clamp(1, n);
    let counts: Vec<(u64, u64)> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let draws = n / streams + u64::from(s < n % streams);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut cond = 0u64;
            let mut both = 0u64;
            for _ in 0..draws {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let x1 = l[0] * z1;
                let x2 = l[1] * z1 + l[2] * z2;
                if x1 > 0.0 {
                    cond += 1;
                    if x2 > 0.0 {
                        both += 1;
                    }
                }
            }
            (cond, both)
        })
        .collect();
    let (cond, both) = counts
        .iter()
        .fold((0u64, 0u64), |(c, b), &(c2, b2)| (c + c2, b + b2));
    if cond == 0 {
        return Err(PriorError::NoConditioningSamples);
    }
    let estimate = both as f64 / cond as f64;
    let std_error = (estimate * (1.0 - estimate) / cond as f64).sqrt();
    Ok(McEstimate {
        estimate,
        std_error,
        n,
        n_conditioning: cond,
        seed,
        streams,
    })
}

/// Lower Cholesky factor `[l11, l21, l22]`; rejects near-singular input.
fn cholesky2(cov: [[f64; 2]; 2]) -> Result<[f64; 3], PriorError> {
    let [[a, b], [c, d]] = cov;
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(PriorError::NotPositiveDefinite("non-finite entry".into()));
    }
    let trace = a + d;
    if (b - c).abs() > 1e-12 * trace.abs().max(1.0) {
        return Err(PriorError::NotPositiveDefinite("not symmetric".into()));
    }
    let half_gap = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let min_eig = trace / 2.0 - half_gap;
    if trace <= 0.0 || min_eig < 1e-12 * trace {
        return Err(PriorError::NotPositiveDefinite(format!(
            "minimum eigenvalue {min_eig:e}"
        )));
    }
    let l11 = a.sqrt();
    let l21 = b / l11;
    let l22 = (d - l21 * l21).sqrt();
    Ok([l11, l21, l22])
}

/// Prior density on a contrast, used to weight a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Normal { mean: f64, sd: f64 },
    Uniform,
    Laplace { loc: f64, scale: f64 },
}

impl Density {
    /// Parses `normal:mean,sd`, `uniform` or `laplace:loc,scale`.
    pub fn parse(spec: &str) -> Result<Self, PriorError> {
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let nums: Vec<f64> = if params.trim().is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| PriorError::BadDensity(format!("{spec}: {e}")))?
        };
        let density = match (name.trim(), nums.as_slice()) {
            ("normal", [mean, sd]) => Density::Normal {
                mean: *mean,
                sd: *sd,
            },
            ("uniform", []) => Density::Uniform,
            ("laplace", [loc, scale]) => Density::Laplace {
                loc: *loc,
                scale: *scale,
            },
            _ => return Err(PriorError::BadDensity(spec.to_string())),
        };
        match density {
            Density::Normal { sd: s, .. } | Density::Laplace { scale: s, .. }
                if !(s > 0.0 && s.is_finite()) =>
            {
                Err(PriorError::BadDensity(format!("{spec}: scale must be positive")))
            }
            d => Ok(d),
        }
    }

    /// Unnormalized density at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Density::Normal { mean, sd } => (-0.5 * ((x - mean) / sd).powi(2)).exp(),
            Density::Uniform => 1.0,
            Density::Laplace { loc, scale } => (-(x - loc).abs() / scale).exp(),
        }
    }
}

/// Discretized prior on a contrast with the operator data needed to turn it
/// into a quantum prior for a complementary contrast.
#[derive(Debug, Clone)]
pub struct GridPrior {
    grid: Vec<f64>,
    weights: Vec<f64>,
    pvm: SpectralDecomposition,
    basis_change: Option<ComplexMatrix>,
}

impl GridPrior {
    pub fn new(
        grid: Vec<f64>,
        weights: Vec<f64>,
        basis_change: Option<ComplexMatrix>,
    ) -> Result<Self, PriorError> {
        if grid.is_empty() {
            return Err(PriorError::EmptyGrid);
        }
        if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PriorError::GridNotAscending);
        }
        if weights.len() != grid.len() {
            return Err(BornError::NotADistribution(format!(
                "{} weights for {} grid points",
                weights.len(),
                grid.len()
            ))
            .into());
        }
        crate::born::validate_distribution(&weights)?;
        if let Some(w) = &basis_change {
            if w.dim() != grid.len() {
                return Err(PriorError::BasisDimension {
                    expected: grid.len(),
                    got: w.dim(),
                });
            }
        }
        let pvm = SpectralDecomposition::diagonal(&grid)?;
        if pvm.len() != grid.len() {
            // Grid points closer than the degeneracy tolerance would merge.
            return Err(PriorError::GridNotAscending);
        }
        Ok(Self {
            grid,
            weights,
            pvm,
            basis_change,
        })
    }

    /// `n` equally spaced cell midpoints on `[lo, hi]`, weighted by the
    /// midpoint rule applied to `density` and renormalized.
    pub fn discretize(
        lo: f64,
        hi: f64,
        n: usize,
        density: &Density,
        basis_change: Option<ComplexMatrix>,
    ) -> Result<Self, PriorError> {
        if n == 0 {
            return Err(PriorError::EmptyGrid);
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(PriorError::GridNotAscending);
        }
        let h = (hi - lo) / n as f64;
        let grid: Vec<f64> = (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let raw: Vec<f64> = grid.iter().map(|&x| density.eval(x) * h).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(PriorError::BadDensity("zero mass on the grid".into()));
        }
        let weights = raw.iter().map(|w| w / total).collect();
        Self::new(grid, weights, basis_change)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pvm(&self) -> &SpectralDecomposition {
        &self.pvm
    }

    pub fn basis_change(&self) -> Option<&ComplexMatrix> {
        self.basis_change.as_ref()
    }

    /// `rho_a = sum_j p_j P_j` over the diagonal PVM.
    pub fn density(&self) -> Result<DensityOperator, PriorError> {
        Ok(density_from_distribution(&self.pvm, &self.weights)?)
    }

    /// Decomposition of the complementary operator `W^H A_a W`.
    pub fn complementary_decomposition(&self) -> Result<SpectralDecomposition, PriorError> {
        let a = self.pvm.reconstruct();
        let b = match &self.basis_change {
            Some(w) => conjugate_by_unitary(&a, w)?,
            None => a,
        };
        Ok(spectral_decompose(&b)?)
    }
}

/// `P(zeta_b in B | rho_a) = trace(rho_a Pi_B)`, where `Pi_B` comes from the
/// spectral decomposition of the basis-changed operator.
pub fn quantum_prior_grid(prior: &GridPrior, set: &[Interval]) -> Result<f64, PriorError> {
    let rho = prior.density()?;
    let decomposition = prior.complementary_decomposition()?;
    let pi = projector_onto(&decomposition, &ValueSet::Intervals(set.to_vec()));
    Ok(born_probability(&rho, &pi)?)
}

/// Pushes a prior on the parameter grid through an estimator channel:
/// `r(u) = sum_theta q(u | theta) p(theta)`, and `rho_u` built from `r` on
/// the diagonal PVM of the `u` grid.
pub fn estimator_blur(
    p: &[f64],
    q: &[Vec<f64>],
) -> Result<(Vec<f64>, DensityOperator), PriorError> {
    crate::born::validate_distribution(p)?;
    if q.len() != p.len() {
        return Err(PriorError::NotConditionalDistribution { row: q.len() });
    }
    let n_u = q.first().map_or(0, Vec::len);
    for (row, probs) in q.iter().enumerate() {
        if probs.len() != n_u || crate::born::validate_distribution(probs).is_err() {
            return Err(PriorError::NotConditionalDistribution { row });
        }
    }
    let mut r = vec![0.0; n_u];
    for (pt, row) in p.iter().zip(q) {
        for (ru, qu) in r.iter_mut().zip(row) {
            *ru += pt * qu;
        }
    }
    let indices: Vec<f64> = (0..n_u).map(|i| i as f64).collect();
    let pvm = SpectralDecomposition::diagonal(&indices)?;
    let rho = density_from_distribution(&pvm, &r)?;
    Ok((r, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_transform_cases() {
        assert_eq!(psi_transform(&TreatmentVector::new(1.0, 1.0, 1.0, 1.0)), [2.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            psi_transform(&TreatmentVector::new(1.0, 0.0, 0.0, 0.0)),
            [0.5, -0.5, -0.5, -0.5]
        );
    }

    #[test]
    fn psi_matrix_is_orthogonal() {
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|k| PSI_TRANSFORM[i][k] * PSI_TRANSFORM[j][k]).sum();
                assert_eq!(dot, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn contrast_cases() {
        let c = contrasts(&TreatmentVector::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(c.zeta_a, 1.0);
        assert!((c.zeta_b + 1.0 / 3.0).abs() < 1e-15);
        let c = contrasts(&TreatmentVector::new(2.5, 2.5, 2.5, 2.5));
        assert_eq!((c.zeta_a, c.zeta_b), (0.0, 0.0));
        let via_psi = contrasts_from_psi(psi_transform(&TreatmentVector::new(1.0, 0.0, 0.0, 0.0)));
        assert!((via_psi.zeta_a - 1.0).abs() < 1e-15);
    }

    #[test]
    fn binary_prior_cases() {
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        assert_eq!(quantum_prior_binary(&DirectionPair::new(x, x).unwrap()), 1.0);
        assert_eq!(quantum_prior_binary(&DirectionPair::new(x, y).unwrap()), 0.5);
        let d = DirectionPair::treatment_example();
        assert!((d.dot() + 1.0 / 3.0).abs() < 1e-15);
        assert!((quantum_prior_binary(&d) - 1.0 / 3.0).abs() < 1e-15);
        assert!((quantum_prior_binary_born(&d).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(DirectionPair::new([1.0, 1.0, 0.0], x).is_err());
    }

    #[test]
    fn analytic_bayes_cases() {
        assert_eq!(bayes_prior_analytic(0.0).unwrap(), 0.5);
        assert!(bayes_prior_analytic(1.0 - 1e-12).unwrap() > 0.9999);
        assert!(matches!(bayes_prior_analytic(1.0), Err(PriorError::CorrOutOfRange(_))));
        assert!(matches!(bayes_prior_analytic(f64::NAN), Err(PriorError::CorrOutOfRange(_))));
    }

    #[test]
    fn mc_rejects_singular_covariance() {
        let singular = [[1.0, 1.0], [1.0, 1.0]];
        assert!(matches!(
            bayes_prior_mc(singular, 1000, 1),
            Err(PriorError::NotPositiveDefinite(_))
        ));
        assert!(matches!(
            bayes_prior_mc([[1.0, 0.5], [0.4, 1.0]], 1000, 1),
            Err(PriorError::NotPositiveDefinite(_))
        ));
        assert_eq!(bayes_prior_mc([[1.0, 0.0], [0.0, 1.0]], 0, 1), Err(PriorError::NoSamples));
    }

    #[test]
    fn mc_identity_covariance_is_half() {
        let r = bayes_prior_mc([[1.0, 0.0], [0.0, 1.0]], 200_000, 11).unwrap();
        assert!((r.estimate - 0.5).abs() <= 4.0 * r.std_error);
        assert_eq!(r.n, 200_000);
    }

    #[test]
    fn mc_is_reproducible_for_fixed_streams() {
        let cov = treatment_contrast_covariance();
        let a = bayes_prior_mc_with_streams(cov, 10_001, 5, 3).unwrap();
        let b = bayes_prior_mc_with_streams(cov, 10_001, 5, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn density_parsing() {
        assert_eq!(
            Density::parse("normal:0,2").unwrap(),
            Density::Normal { mean: 0.0, sd: 2.0 }
        );
        assert_eq!(Density::parse("uniform").unwrap(), Density::Uniform);
        assert!(Density::parse("normal:0,-1").is_err());
        assert!(Density::parse("cauchy:0,1").is_err());
        assert!(Density::parse("normal:0").is_err());
    }

    #[test]
    fn grid_prior_identity_is_classical_tail() {
        let prior = GridPrior::new(vec![-1.5, -0.5, 0.5, 1.5], vec![0.1, 0.2, 0.3, 0.4], None).unwrap();
        let p = quantum_prior_grid(&prior, &[Interval::new(0.0, f64::INFINITY)]).unwrap();
        assert!((p - 0.7).abs() < 1e-15);
        let all = quantum_prior_grid(&prior, &[Interval::all()]).unwrap();
        assert!((all - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_prior_qubit_reproduces_binary_prior() {
        let d = DirectionPair::treatment_example();
        let w = qubit_basis_change(&d).unwrap();
        let prior = GridPrior::new(vec![-1.0, 1.0], vec![0.0, 1.0], Some(w)).unwrap();
        let p = quantum_prior_grid(&prior, &[Interval::new(0.0, f64::INFINITY)]).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert_eq!(GridPrior::new(vec![], vec![], None).unwrap_err(), PriorError::EmptyGrid);
        assert_eq!(
            GridPrior::new(vec![1.0, 0.0], vec![0.5, 0.5], None).unwrap_err(),
            PriorError::GridNotAscending
        );
        let w = ComplexMatrix::identity(3);
        assert!(matches!(
            GridPrior::new(vec![0.0, 1.0], vec![0.5, 0.5], Some(w)),
            Err(PriorError::BasisDimension { .. })
        ));
        let skew = ComplexMatrix::from_real(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let prior = GridPrior::new(vec![0.0, 1.0], vec![0.5, 0.5], Some(skew)).unwrap();
        assert!(matches!(
            quantum_prior_grid(&prior, &[Interval::all()]),
            Err(PriorError::Hilbert(HilbertError::NotUnitary { .. }))
        ));
    }

    #[test]
    fn discretize_normal_is_symmetric() {
        let prior =
            GridPrior::discretize(-3.0, 3.0, 6, &Density::Normal { mean: 0.0, sd: 1.0 }, None).unwrap();
        assert_eq!(prior.grid()[0], -2.5);
        let w = prior.weights();
        assert!((w[0] - w[5]).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn estimator_blur_cases() {
        let p = [0.2, 0.5, 0.3];
        let id: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let (r, rho) = estimator_blur(&p, &id).unwrap();
        assert_eq!(r, p.to_vec());
        assert!((rho.as_matrix()[(1, 1)].re - 0.5).abs() < 1e-15);

        let uniform = vec![vec![0.25; 4]; 3];
        let (r, _) = estimator_blur(&p, &uniform).unwrap();
        assert!(r.iter().all(|v| (v - 0.25).abs() < 1e-15));

        let tri = vec![
            vec![0.8, 0.2, 0.0],
            vec![0.1, 0.8, 0.1],
            vec![0.0, 0.2, 0.8],
        ];
        let (r, _) = estimator_blur(&p, &tri).unwrap();
        let hand = [
            0.2 * 0.8 + 0.5 * 0.1,
            0.2 * 0.2 + 0.5 * 0.8 + 0.3 * 0.2,
            0.5 * 0.1 + 0.3 * 0.8,
        ];
        for (a, b) in r.iter().zip(hand) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(matches!(
            estimator_blur(&p, &[vec![1.0], vec![1.0]]),
            Err(PriorError::NotConditionalDistribution { .. })
        ));
    }
}
