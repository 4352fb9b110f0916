//! Model reduction for linear prediction.
//!
//! The regression vector is expanded in the eigenvectors of the predictor
//! covariance, `beta = sum_i gamma_i d_i`. When exactly `m` of the
//! coefficients are nonzero (after rotating inside degenerate eigenspaces so
//! that at most one direction per eigenspace carries `beta`), `beta` lies in
//! the `m`-dimensional Krylov space spanned by
//! `sigma_xy, Sigma sigma_xy, Sigma^2 sigma_xy, ...`, and population PLS
//! recovers it after `m` steps.
//!
//! Sample PLS is NIPALS on centered data. Its `k`-component estimate is the
//! population algorithm applied to the sample moments.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::degeneracy_tolerance;

/// Eigenvalues closer than this fraction of the spectral range share an eigenspace.
pub const DEGEN_REL: f64 = 1e-8;
/// Relative cutoff for numerical rank of Krylov sequences.
pub const RANK_REL: f64 = 1e-8;
/// `gamma_i` below `ZERO_REL * ||beta|| * sqrt(p)` is treated as zero.
pub const ZERO_REL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("covariance is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid residual variance {0}")]
    InvalidVariance(f64),
    #[error("component count {k} outside 0..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("reduction size {m} outside 0..{p}")]
    MOutOfRange { m: usize, p: usize },
    #[error("requested {requested} components but only {attainable} are attainable")]
    RankDeficient { requested: usize, attainable: usize },
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("non-finite value in data at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("activation value {value} at row {row} is outside the range of {activation}")]
    ValueOutsideActivationRange {
        row: usize,
        value: f64,
        activation: String,
    },
    #[error("unknown activation {0:?}")]
    UnknownActivation(String),
}

/// Population quantities of a linear regression with random predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionPopulation {
    sigma_x: DMatrix<f64>,
    sigma_xy: DVector<f64>,
    beta: DVector<f64>,
    sigma2: f64,
}

fn check_covariance(sigma_x: &DMatrix<f64>) -> Result<(), ReductionError> {
    let p = sigma_x.nrows();
    if p == 0 || sigma_x.ncols() != p {
        return Err(ReductionError::NotPositiveDefinite(format!(
            "shape {}x{}",
            sigma_x.nrows(),
            sigma_x.ncols()
        )));
    }
    if sigma_x.iter().any(|v| !v.is_finite()) {
        return Err(ReductionError::NotPositiveDefinite("non-finite entry".into()));
    }
    let asym = (sigma_x - sigma_x.transpose()).norm();
    if asym > 1e-12 * (1.0 + sigma_x.norm()) {
        return Err(ReductionError::NotPositiveDefinite("not symmetric".into()));
    }
    let trace = sigma_x.trace();
    let min = sigma_x.clone().symmetric_eigenvalues().min();
    if !(min > 1e-10 * trace / p as f64) {
        return Err(ReductionError::NotPositiveDefinite(format!(
            "minimum eigenvalue {min:e}"
        )));
    }
    Ok(())
}

impl RegressionPopulation {
    /// From the predictor covariance and the regression vector.
    pub fn new(
        sigma_x: DMatrix<f64>,
        beta: DVector<f64>,
        sigma2: f64,
    ) -> Result<Self, ReductionError> {
        check_covariance(&sigma_x)?;
        if beta.len() != sigma_x.nrows() {
            return Err(ReductionError::DimensionMismatch(format!(
                "beta has {} entries, covariance is {}x{}",
                beta.len(),
                sigma_x.nrows(),
                sigma_x.nrows()
            )));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(ReductionError::InvalidVariance(sigma2));
        }
        let sigma_xy = &sigma_x * &beta;
        Ok(Self {
            sigma_x,
            sigma_xy,
            beta,
            sigma2,
        })
    }

    /// From second moments; `beta = Sigma_x^{-1} sigma_xy`.
    pub fn from_moments(
        sigma_x: DMatrix<f64>,
        sigma_xy: DVector<f64>,
        sigma2: f64,
    ) -> Result<Self, ReductionError> {
        check_covariance(&sigma_x)?;
        if sigma_xy.len() != sigma_x.nrows() {
            return Err(ReductionError::DimensionMismatch(format!(
                "sigma_xy has {} entries, covariance is {}x{}",
                sigma_xy.len(),
                sigma_x.nrows(),
                sigma_x.nrows()
            )));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(ReductionError::InvalidVariance(sigma2));
        }
        let chol = sigma_x
            .clone()
            .cholesky()
            .ok_or_else(|| ReductionError::NotPositiveDefinite("Cholesky failed".into()))?;
        let beta = chol.solve(&sigma_xy);
        Ok(Self {
            sigma_x,
            sigma_xy,
            beta,
            sigma2,
        })
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn sigma_x(&self) -> &DMatrix<f64> {
        &self.sigma_x
    }

    pub fn sigma_xy(&self) -> &DVector<f64> {
        &self.sigma_xy
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Expected squared prediction error of `x . b`:
    /// `(beta - b)' Sigma_x (beta - b) + sigma^2`.
    pub fn prediction_loss(&self, b: &DVector<f64>) -> f64 {
        let d = &self.beta - b;
        d.dot(&(&self.sigma_x * &d)) + self.sigma2
    }
}

/// `beta = sum_i gamma_i d_i` in a covariance eigenbasis adapted to `beta`.
#[derive(Debug, Clone, Serialize)]
pub struct PlsModel {
    /// Eigenvalues of `Sigma_x`, descending.
    pub eigvals: Vec<f64>,
    /// Orthonormal eigenvectors as rows, aligned with `eigvals`.
    pub dirs: Vec<Vec<f64>>,
    pub gammas: Vec<f64>,
    /// Number of nonzero `gammas`.
    pub m: usize,
}

impl PlsModel {
    pub fn reconstruct_beta(&self) -> DVector<f64> {
        let p = self.eigvals.len();
        let mut beta = DVector::zeros(p);
        for (d, &g) in self.dirs.iter().zip(&self.gammas) {
            if g != 0.0 {
                beta += DVector::from_column_slice(d) * g;
            }
        }
        beta
    }
}

/// Groups descending eigenvalues into clusters closer than the degeneracy tolerance.
fn eigen_clusters(values: &[f64]) -> Vec<Vec<usize>> {
    let tol = degeneracy_tolerance(DEGEN_REL, values);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if values[*c.last().unwrap()] - v <= tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Descending eigen-decomposition of a symmetric matrix.
fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Expands `beta` in the eigenvectors of `Sigma_x`. Inside every degenerate
/// eigenspace the basis is rotated so that only the first direction carries
/// the projection of `beta`.
pub fn decompose_beta(pop: &RegressionPopulation) -> Result<PlsModel, ReductionError> {
    let p = pop.p();
    let (eigvals, vectors) = sorted_eigen(&pop.sigma_x);
    let beta = &pop.beta;
    let zero_tol = ZERO_REL * beta.norm() * (p as f64).sqrt();

    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut gammas = Vec::with_capacity(p);
    for cluster in eigen_clusters(&eigvals) {
        let v = DMatrix::from_fn(p, cluster.len(), |r, c| vectors[(r, cluster[c])]);
        let coeffs = v.transpose() * beta;
        if cluster.len() == 1 {
            let g = coeffs[0];
            dirs.push(v.column(0).iter().copied().collect());
            gammas.push(if g.abs() <= zero_tol { 0.0 } else { g });
            continue;
        }
        let norm = coeffs.norm();
        if norm <= zero_tol {
            for c in 0..cluster.len() {
                dirs.push(v.column(c).iter().copied().collect());
                gammas.push(0.0);
            }
            continue;
        }
        // Householder reflector in eigenspace coordinates: its columns are an
        // orthonormal basis whose first column is +-coeffs/norm.
        let u = &coeffs / norm;
        let mut h = u.clone();
        h[0] += if u[0] >= 0.0 { 1.0 } else { -1.0 };
        let hh = h.dot(&h);
        let reflector = DMatrix::identity(cluster.len(), cluster.len()) - &h * h.transpose() * (2.0 / hh);
        let mut rotated = &v * reflector;
        rotated.column_mut(0).copy_from(&(&v * &u));
        for c in 0..cluster.len() {
            dirs.push(rotated.column(c).iter().copied().collect());
            gammas.push(if c == 0 { norm } else { 0.0 });
        }
    }
    let m = gammas.iter().filter(|g| **g != 0.0).count();
    Ok(PlsModel {
        eigvals,
        dirs,
        gammas,
        m,
    })
}

/// Orthonormal basis of the Krylov space of `(a, s)`, stopping at `max_dim`
/// vectors or when the sequence becomes numerically dependent.
fn krylov_basis(a: &DMatrix<f64>, s: &DVector<f64>, max_dim: usize) -> DMatrix<f64> {
    let p = s.len();
    let s_norm = s.norm();
    if s_norm == 0.0 || max_dim == 0 {
        return DMatrix::zeros(p, 0);
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<f64>> = vec![s / s_norm];
    while basis.len() < max_dim.min(p) {
        let mut w = a * basis.last().unwrap();
        // Two passes of Gram-Schmidt keep the basis orthogonal to rounding.
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= RANK_REL * scale {
            break;
        }
        basis.push(w / norm);
    }
    DMatrix::from_columns(&basis)
}

/// Dimension of the Krylov space of `(Sigma_x, sigma_xy)`.
pub fn relevant_component_count(pop: &RegressionPopulation) -> Result<usize, ReductionError> {
    Ok(krylov_basis(&pop.sigma_x, &pop.sigma_xy, pop.p()).ncols())
}

/// `Sigma`-orthogonal projection of `beta` onto `span(q)`:
/// `q (q' Sigma q)^{-1} q' Sigma beta`.
fn sigma_projection(sigma: &DMatrix<f64>, sigma_beta: &DVector<f64>, q: &DMatrix<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return DVector::zeros(sigma_beta.len());
    }
    let gram = q.transpose() * sigma * q;
    let rhs = q.transpose() * sigma_beta;
    let coef = gram
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .unwrap_or_else(|| DVector::zeros(q.ncols()));
    q * coef
}

/// Population PLS after `k` steps: the `Sigma_x`-orthogonal projection of
/// `beta` onto the first `k` Krylov vectors. For `k >= m` this is `beta`.
pub fn pls_population(pop: &RegressionPopulation, k: usize) -> Result<DVector<f64>, ReductionError> {
    if k > pop.p() {
        return Err(ReductionError::KOutOfRange { k, max: pop.p() });
    }
    let q = krylov_basis(&pop.sigma_x, &pop.sigma_xy, k);
    Ok(sigma_projection(&pop.sigma_x, &pop.sigma_xy, &q))
}

/// A fitted sample PLS regression.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlsFit {
    pub coefficients: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub y_mean: f64,
    pub components: usize,
}

impl PlsFit {
    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        let b = DVector::from_column_slice(&self.coefficients);
        let mut out = DVector::from_element(x.nrows(), self.y_mean);
        for (r, o) in out.iter_mut().enumerate() {
            *o += (0..x.ncols())
                .map(|c| (x[(r, c)] - self.x_mean[c]) * b[c])
                .sum::<f64>();
        }
        out
    }

    pub fn coefficient_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coefficients)
    }
}

/// NIPALS weights, loadings and response loadings for successive components.
struct Nipals {
    w: Vec<DVector<f64>>,
    p: Vec<DVector<f64>>,
    q: Vec<f64>,
}

impl Nipals {
    /// Extracts up to `k_max` components, stopping early once the
    /// cross-covariance of the deflated data vanishes.
    fn run(xc: &DMatrix<f64>, yc: &DVector<f64>, k_max: usize) -> Self {
        let mut e = xc.clone();
        let mut f = yc.clone();
        let stop = RANK_REL * xc.norm() * yc.norm();
        let mut out = Nipals {
            w: Vec::new(),
            p: Vec::new(),
            q: Vec::new(),
        };
        for _ in 0..k_max {
            let mut w = e.tr_mul(&f);
            let nw = w.norm();
            if !(nw > stop) {
                break;
            }
            w /= nw;
            let t = &e * &w;
            let tt = t.dot(&t);
            if !(tt > 0.0) {
                break;
            }
            let load = e.tr_mul(&t) / tt;
            let qa = f.dot(&t) / tt;
            e -= &t * load.transpose();
            f.axpy(-qa, &t, 1.0);
            out.w.push(w);
            out.p.push(load);
            out.q.push(qa);
        }
        out
    }

    fn len(&self) -> usize {
        self.q.len()
    }

    /// Regression coefficients from the first `k` components:
    /// `W (P' W)^{-1} q`.
    fn coefficients(&self, k: usize, n_features: usize) -> DVector<f64> {
        if k == 0 {
            return DVector::zeros(n_features);
        }
        let w = DMatrix::from_columns(&self.w[..k]);
        let p = DMatrix::from_columns(&self.p[..k]);
        let q = DVector::from_column_slice(&self.q[..k]);
        let ptw = p.transpose() * &w;
        // P'W is unit upper triangular for NIPALS.
        let z = ptw
            .solve_upper_triangular(&q)
            .unwrap_or_else(|| ptw.lu().solve(&q).unwrap_or_else(|| DVector::zeros(k)));
        w * z
    }
}

fn check_data(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(), ReductionError> {
    if x.nrows() != y.len() {
        return Err(ReductionError::DimensionMismatch(format!(
            "{} rows of features, {} responses",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() < 2 {
        return Err(ReductionError::TooFewRows {
            needed: 2,
            got: x.nrows(),
        });
    }
    for c in 0..x.ncols() {
        for r in 0..x.nrows() {
            if !x[(r, c)].is_finite() {
                return Err(ReductionError::NonFinite { row: r, col: c });
            }
        }
    }
    if let Some(r) = y.iter().position(|v| !v.is_finite()) {
        return Err(ReductionError::NonFinite {
            row: r,
            col: x.ncols(),
        });
    }
    Ok(())
}

struct Centered {
    xc: DMatrix<f64>,
    yc: DVector<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
}

fn center(x: &DMatrix<f64>, y: &DVector<f64>) -> Centered {
    let n = x.nrows() as f64;
    let x_mean: Vec<f64> = (0..x.ncols()).map(|c| x.column(c).sum() / n).collect();
    let y_mean = y.sum() / n;
    let xc = DMatrix::from_fn(x.nrows(), x.ncols(), |r, c| x[(r, c)] - x_mean[c]);
    let yc = y.map(|v| v - y_mean);
    Centered {
        xc,
        yc,
        x_mean,
        y_mean,
    }
}

/// Sample PLS with `k` components on internally centered data.
pub fn pls_fit(x: &DMatrix<f64>, y: &DVector<f64>, k: usize) -> Result<PlsFit, ReductionError> {
    check_data(x, y)?;
    if k > x.ncols() {
        return Err(ReductionError::KOutOfRange { k, max: x.ncols() });
    }
    let c = center(x, y);
    let nip = Nipals::run(&c.xc, &c.yc, k);
    if nip.len() < k {
        return Err(ReductionError::RankDeficient {
            requested: k,
            attainable: nip.len(),
        });
    }
    Ok(PlsFit {
        coefficients: nip.coefficients(k, x.ncols()).iter().copied().collect(),
        x_mean: c.x_mean,
        y_mean: c.y_mean,
        components: k,
    })
}

/// As [`pls_fit`], but stops at the attainable number of components instead
/// of failing; `components` records how many were used.
pub fn pls_fit_saturating(x: &DMatrix<f64>, y: &DVector<f64>, k: usize) -> Result<PlsFit, ReductionError> {
    check_data(x, y)?;
    if k > x.ncols() {
        return Err(ReductionError::KOutOfRange { k, max: x.ncols() });
    }
    let c = center(x, y);
    let nip = Nipals::run(&c.xc, &c.yc, k);
    let used = k.min(nip.len());
    Ok(PlsFit {
        coefficients: nip.coefficients(used, x.ncols()).iter().copied().collect(),
        x_mean: c.x_mean,
        y_mean: c.y_mean,
        components: used,
    })
}

/// Per-`k` cross-validated losses and the selected component count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    pub best_k: usize,
    /// `losses[k]`: mean over folds of the held-out mean squared error.
    pub losses: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
}

/// Chooses the number of PLS components by `folds`-fold cross-validation
/// over `k = 0..=k_max`. Ties go to the smaller `k`. Beyond the number of
/// attainable components a fold reuses its largest attainable fit.
pub fn cross_validate_m(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    folds: usize,
    k_max: usize,
    seed: u64,
) -> Result<CvResult, ReductionError> {
    check_data(x, y)?;
    let n = x.nrows();
    if folds < 2 || n < folds {
        return Err(ReductionError::TooFewRows {
            needed: folds.max(2),
            got: n,
        });
    }
    if k_max > x.ncols() {
        return Err(ReductionError::KOutOfRange {
            k: k_max,
            max: x.ncols(),
        });
    }
    let assignment = fold_assignment(n, folds, seed);

    let per_fold: Vec<Vec<f64>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let train: Vec<usize> = (0..n).filter(|&i| assignment[i] != fold).collect();
            let test: Vec<usize> = (0..n).filter(|&i| assignment[i] == fold).collect();
            let x_train = x.select_rows(&train);
            let y_train = y.select_rows(&train);
            let x_test = x.select_rows(&test);
            let y_test = y.select_rows(&test);
            let c = center(&x_train, &y_train);
            let nip = Nipals::run(&c.xc, &c.yc, k_max);
            (0..=k_max)
                .map(|k| {
                    let fit = PlsFit {
                        coefficients: nip
                            .coefficients(k.min(nip.len()), x.ncols())
                            .iter()
                            .copied()
                            .collect(),
                        x_mean: c.x_mean.clone(),
                        y_mean: c.y_mean,
                        components: k.min(nip.len()),
                    };
                    let pred = fit.predict(&x_test);
                    (pred - &y_test).norm_squared() / test.len() as f64
                })
                .collect()
        })
        .collect();

    let losses: Vec<f64> = (0..=k_max)
        .map(|k| per_fold.iter().map(|l| l[k]).sum::<f64>() / folds as f64)
        .collect();
    let mut best_k = 0;
    for (k, &l) in losses.iter().enumerate() {
        if l < losses[best_k] {
            best_k = k;
        }
    }
    Ok(CvResult {
        best_k,
        losses,
        folds,
        seed,
    })
}

/// Fold index per row: a seeded shuffle dealt round-robin into `folds` groups.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignment = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        assignment[row] = pos % folds;
    }
    assignment
}

/// Strictly increasing activation with `g(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Arctan,
}

impl Activation {
    pub fn parse(name: &str) -> Result<Self, ReductionError> {
        match name {
            "identity" | "linear" => Ok(Activation::Identity),
            "tanh" => Ok(Activation::Tanh),
            "arctan" | "atan" => Ok(Activation::Arctan),
            other => Err(ReductionError::UnknownActivation(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Tanh => "tanh",
            Activation::Arctan => "arctan",
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Arctan => x.atan(),
        }
    }

    /// `g^{-1}(a)`, or `None` outside the open range of `g`.
    pub fn inverse(&self, a: f64) -> Option<f64> {
        let v = match self {
            Activation::Identity => a,
            Activation::Tanh if a.abs() < 1.0 => a.atanh(),
            Activation::Arctan if a.abs() < std::f64::consts::FRAC_PI_2 => a.tan(),
            _ => return None,
        };
        v.is_finite().then_some(v)
    }
}

/// Single perceptron `a = g(x . w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perceptron {
    pub weights: DVector<f64>,
    pub activation: Activation,
}

impl Perceptron {
    pub fn output(&self, x: &DMatrix<f64>) -> DVector<f64> {
        (x * &self.weights).map(|v| self.activation.apply(v))
    }
}

/// Inverts the activation elementwise and runs sample PLS on `(x, g^{-1}(a))`.
pub fn perceptron_reduce(
    x: &DMatrix<f64>,
    a: &DVector<f64>,
    activation: Activation,
    k: usize,
) -> Result<PlsFit, ReductionError> {
    let y = linearize(a, activation)?;
    pls_fit(x, &y, k)
}

/// `g^{-1}(a)` elementwise.
pub fn linearize(a: &DVector<f64>, activation: Activation) -> Result<DVector<f64>, ReductionError> {
    let mut y = DVector::zeros(a.len());
    for (row, (&v, out)) in a.iter().zip(y.iter_mut()).enumerate() {
        *out = activation
            .inverse(v)
            .ok_or_else(|| ReductionError::ValueOutsideActivationRange {
                row,
                value: v,
                activation: activation.name().to_string(),
            })?;
    }
    Ok(y)
}

/// PLS reduction loss against reductions onto random subspaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionComparison {
    pub m: usize,
    pub pls_loss: f64,
    pub mean_random_loss: f64,
    pub random_losses: Vec<f64>,
    pub seed: u64,
}

/// Compares the `m`-step PLS loss with `Sigma_x`-projections of `beta` onto
/// `trials` uniformly random `m`-dimensional subspaces (orthonormalized
/// Gaussian frames, one ChaCha substream per trial).
pub fn compare_reductions(
    pop: &RegressionPopulation,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<ReductionComparison, ReductionError> {
    let p = pop.p();
    if m >= p {
        return Err(ReductionError::MOutOfRange { m, p });
    }
    let pls_loss = pop.prediction_loss(&pls_population(pop, m)?);
    let random_losses: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let frame = DMatrix::from_fn(p, m, |_, _| rng.sample::<f64, _>(StandardNormal));
            let q = frame.qr().q();
            let eta = sigma_projection(&pop.sigma_x, &pop.sigma_xy, &q);
            pop.prediction_loss(&eta)
        })
        .collect();
    let mean_random_loss = if trials == 0 {
        f64::NAN
    } else {
        random_losses.iter().sum::<f64>() / trials as f64
    };
    Ok(ReductionComparison {
        m,
        pls_loss,
        mean_random_loss,
        random_losses,
        seed,
    })
}
