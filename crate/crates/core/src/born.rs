//! Born-rule probability calculus.
//!
//! Knowledge about an accessible variable is carried by a [`DensityOperator`]
//! and questions about another variable by projectors from its spectral
//! decomposition. Probabilities are `trace(rho * Pi)`; expectations are
//! `trace(rho * A)`. Imperfect measurements enter through channels
//! `q(z | u)`, which turn into per-outcome effects `sum_i q(z | u_i) P_i`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::hilbert::{
    spectral_decompose, ComplexMatrix, HermitianOperator, HilbertError, SpectralDecomposition,
    StateVector, Tolerances, C64,
};

/// Slack allowed on either side of `[0, 1]` before a probability is treated
/// as a numerical failure instead of being clamped.
pub const PROBABILITY_SLACK: f64 = 1e-10;
const DISTRIBUTION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BornError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("not a density operator: {0}")]
    NotADensity(String),
    #[error("operator is not an orthogonal projector (defect {defect:e})")]
    NotAProjector { defect: f64 },
    #[error("probability {value} lies outside [0, 1] beyond rounding slack")]
    NumericOutOfRange { value: f64 },
    #[error("expectation has imaginary part {imag:e}")]
    ComplexExpectation { imag: f64 },
    #[error("likelihood at eigenvalue index {index} is negative or not finite ({value})")]
    NegativeLikelihood { index: usize, value: f64 },
    #[error("channel row {row} is not a conditional distribution: {reason}")]
    NotConditionalDistribution { row: usize, reason: String },
    #[error("amplitude modulus {modulus} exceeds 1")]
    AmplitudeOutOfRange { modulus: f64 },
}

fn clamp_probability(value: f64) -> Result<f64, BornError> {
    if !value.is_finite() || value < -PROBABILITY_SLACK || value > 1.0 + PROBABILITY_SLACK {
        return Err(BornError::NumericOutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Checks nonnegativity and unit mass of a probability vector.
pub fn validate_distribution(p: &[f64]) -> Result<(), BornError> {
    if p.is_empty() {
        return Err(BornError::NotADistribution("empty".into()));
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(BornError::NotADistribution(format!(
            "entry {i} is {v}"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(BornError::NotADistribution(format!("sums to {total}")));
    }
    Ok(())
}

/// Mixed state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self, BornError> {
        let h = HermitianOperator::new(m)?;
        let trace = h.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(BornError::NotADensity(format!("trace is {trace}")));
        }
        let spectrum = spectral_decompose(&h)?;
        let min = spectrum.eigenvalues()[0];
        if min < -1e-10 {
            return Err(BornError::NotADensity(format!(
                "minimum eigenvalue is {min}"
            )));
        }
        Ok(Self {
            matrix: h.as_matrix().clone(),
        })
    }

    /// The pure state `|psi><psi|`.
    pub fn pure(state: &StateVector) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: DMatrix::<C64>::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn to_operator(&self) -> HermitianOperator {
        HermitianOperator::from_hermitian_unchecked(self.matrix.clone())
    }

    /// `W^H rho W`.
    pub fn conjugate(&self, w: &ComplexMatrix) -> Result<Self, BornError> {
        let h = crate::hilbert::conjugate_by_unitary(&self.to_operator(), w)?;
        Ok(Self {
            matrix: h.as_matrix().clone(),
        })
    }

    /// True when `rho` commutes with every projector of `s`.
    pub fn commutes_with(&self, s: &SpectralDecomposition, tol: f64) -> bool {
        s.projectors()
            .iter()
            .all(|p| (&self.matrix * p - p * &self.matrix).norm() <= tol)
    }
}

/// A variable together with its operator; the operator's spectrum is the
/// variable's set of possible values.
#[derive(Debug, Clone)]
pub struct AccessibleVariable {
    label: String,
    operator: HermitianOperator,
    spectrum: SpectralDecomposition,
    context: Option<String>,
}

impl AccessibleVariable {
    pub fn new(
        label: impl Into<String>,
        operator: HermitianOperator,
        context: Option<String>,
    ) -> Result<Self, BornError> {
        let spectrum = spectral_decompose(&operator)?;
        Ok(Self {
            label: label.into(),
            operator,
            spectrum,
            context,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn context(&self) -> Option<&str> {
        self.context.as_deref()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn values(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    /// Maximal iff every eigenvalue is simple.
    pub fn is_maximal(&self) -> bool {
        self.spectrum.is_nondegenerate()
    }
}

/// `F = sum_i p(z | u_i) P_i` for one observed data point.
#[derive(Debug, Clone)]
pub struct LikelihoodEffect {
    pub operator: HermitianOperator,
    pub data_point: String,
}

impl LikelihoodEffect {
    /// `0 <= F <= I`.
    pub fn is_bounded(&self) -> Result<bool, BornError> {
        let s = spectral_decompose(&self.operator)?;
        let ev = s.eigenvalues();
        Ok(ev[0] >= -1e-10 && ev[ev.len() - 1] <= 1.0 + 1e-10)
    }
}

/// Conditional distributions `q(z_k | u_i)`; row `i` is the law of the data
/// given the `i`-th eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    z_values: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(z_values: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self, BornError> {
        for (row, probs) in rows.iter().enumerate() {
            if probs.len() != z_values.len() {
                return Err(BornError::NotConditionalDistribution {
                    row,
                    reason: format!("{} entries for {} data values", probs.len(), z_values.len()),
                });
            }
            validate_distribution(probs).map_err(|e| BornError::NotConditionalDistribution {
                row,
                reason: e.to_string(),
            })?;
        }
        Ok(Self { z_values, rows })
    }

    /// Noiseless channel reporting the parameter value itself.
    pub fn identity(values: &[f64]) -> Self {
        let n = values.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|k| if i == k { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            z_values: values.to_vec(),
            rows,
        }
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z_values
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.len()
    }

    fn check_against(&self, s: &SpectralDecomposition) -> Result<(), BornError> {
        if self.rows.len() != s.len() {
            return Err(BornError::NotConditionalDistribution {
                row: self.rows.len(),
                reason: format!(
                    "channel has {} rows but the spectrum has {} values",
                    self.rows.len(),
                    s.len()
                ),
            });
        }
        Ok(())
    }
}

/// `|<i|j>|^2`.
pub fn transition_probability(i: &StateVector, j: &StateVector) -> Result<f64, BornError> {
    if i.dim() != j.dim() {
        return Err(BornError::DimensionMismatch {
            left: i.dim(),
            right: j.dim(),
        });
    }
    clamp_probability(i.inner(j)?.norm_sqr())
}

/// `rho = sum_j p_j P_j / rank(P_j)`.
pub fn density_from_distribution(
    s: &SpectralDecomposition,
    p: &[f64],
) -> Result<DensityOperator, BornError> {
    if p.len() != s.len() {
        return Err(BornError::NotADistribution(format!(
            "{} weights for {} distinct eigenvalues",
            p.len(),
            s.len()
        )));
    }
    validate_distribution(p)?;
    let weights: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(j, &pj)| pj / s.rank(j) as f64)
        .collect();
    let m = s.weighted_sum(&weights);
    Ok(DensityOperator {
        matrix: (&m + m.adjoint()).scale(0.5),
    })
}

fn check_projector(pi: &ComplexMatrix) -> Result<(), BornError> {
    let m = pi.as_matrix();
    let tol = Tolerances::default().herm(m);
    let defect = (m - m.adjoint()).norm().max((m * m - m).norm());
    if defect > tol {
        return Err(BornError::NotAProjector { defect });
    }
    Ok(())
}

/// `trace(rho * Pi)`.
pub fn born_probability(rho: &DensityOperator, pi: &ComplexMatrix) -> Result<f64, BornError> {
    if rho.dim() != pi.dim() {
        return Err(BornError::DimensionMismatch {
            left: rho.dim(),
            right: pi.dim(),
        });
    }
    check_projector(pi)?;
    clamp_probability(trace_product(rho.as_matrix(), pi.as_matrix()).re)
}

/// `trace(A * B)` without forming the product.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `trace(rho * A)`.
pub fn expectation(rho: &DensityOperator, a: &HermitianOperator) -> Result<f64, BornError> {
    if rho.dim() != a.dim() {
        return Err(BornError::DimensionMismatch {
            left: rho.dim(),
            right: a.dim(),
        });
    }
    let t = trace_product(rho.as_matrix(), a.as_matrix());
    if t.im.abs() > 1e-10 * (1.0 + a.frobenius_norm()) {
        return Err(BornError::ComplexExpectation { imag: t.im });
    }
    Ok(t.re)
}

/// Likelihood effect for one data point; `lik[i]` is `p(z | u_i)` for the
/// `i`-th eigenvalue of `s`.
pub fn likelihood_effect(
    s: &SpectralDecomposition,
    lik: &[f64],
    data_point: impl Into<String>,
) -> Result<LikelihoodEffect, BornError> {
    if lik.len() != s.len() {
        return Err(BornError::DimensionMismatch {
            left: s.len(),
            right: lik.len(),
        });
    }
    if let Some((index, &value)) = lik
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(BornError::NegativeLikelihood { index, value });
    }
    Ok(LikelihoodEffect {
        operator: HermitianOperator::from_hermitian_unchecked(s.weighted_sum(lik)),
        data_point: data_point.into(),
    })
}

/// Operator for the observed data: `sum_i (sum_k z_k q(z_k | u_i)) P_i`.
/// Its expectation in a state is the expected value of the data.
pub fn data_operator(
    s: &SpectralDecomposition,
    q: &Channel,
) -> Result<HermitianOperator, BornError> {
    q.check_against(s)?;
    let weights: Vec<f64> = q
        .rows
        .iter()
        .map(|row| row.iter().zip(&q.z_values).map(|(p, z)| p * z).sum())
        .collect();
    Ok(HermitianOperator::from_hermitian_unchecked(
        s.weighted_sum(&weights),
    ))
}

/// One effect per data value: `F_k = sum_i q(z_k | u_i) P_i`.
pub fn data_effects(
    s: &SpectralDecomposition,
    q: &Channel,
) -> Result<Vec<LikelihoodEffect>, BornError> {
    q.check_against(s)?;
    (0..q.z_values.len())
        .map(|k| {
            let lik: Vec<f64> = q.rows.iter().map(|row| row[k]).collect();
            likelihood_effect(s, &lik, format!("z={}", q.z_values[k]))
        })
        .collect()
}

/// `P(z = z_k | rho) = trace(rho F_k)` for every data value.
pub fn data_distribution(
    rho: &DensityOperator,
    s: &SpectralDecomposition,
    q: &Channel,
) -> Result<Vec<f64>, BornError> {
    if rho.dim() != s.dim() {
        return Err(BornError::DimensionMismatch {
            left: rho.dim(),
            right: s.dim(),
        });
    }
    q.check_against(s)?;
    // trace(rho F_k) = sum_i q(z_k | u_i) trace(rho P_i)
    let weights: Vec<f64> = s
        .projectors()
        .iter()
        .map(|p| trace_product(rho.as_matrix(), p).re)
        .collect();
    (0..q.z_values.len())
        .map(|k| {
            let v: f64 = q.rows.iter().zip(&weights).map(|(row, w)| row[k] * w).sum();
            clamp_probability(v)
        })
        .collect()
}

/// `|z1 z2|^2` for amplitudes of independent events.
pub fn independent_joint_probability(z1: C64, z2: C64) -> Result<f64, BornError> {
    for z in [z1, z2] {
        let modulus = z.norm();
        if !modulus.is_finite() || modulus > 1.0 + 1e-12 {
            return Err(BornError::AmplitudeOutOfRange { modulus });
        }
    }
    clamp_probability((z1 * z2).norm_sqr())
}
