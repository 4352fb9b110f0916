//! Finite-dimensional complex linear algebra: Hermitian operators, their
//! spectral decompositions, operator functions, projectors and tensor
//! products.
//!
//! Every operator here is dense. A [`SpectralDecomposition`] stores one
//! orthogonal projector per *distinct* eigenvalue, so degenerate eigenspaces
//! are represented canonically by their projector rather than by an arbitrary
//! choice of eigenvectors inside them.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has dimension zero")]
    Empty,
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: ||M - M^H||_F = {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not unitary: ||W^H W - I||_F = {defect:e} exceeds {tolerance:e}")]
    NotUnitary { defect: f64, tolerance: f64 },
    #[error("eigensolver did not converge for a {dim}x{dim} operator")]
    EigensolverFailure { dim: usize },
    #[error("function is undefined at eigenvalue {eigenvalue}")]
    DomainError { eigenvalue: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state vector norm {norm} differs from 1 by more than {tolerance:e}")]
    NotNormalized { norm: f64, tolerance: f64 },
}

/// Numerical tolerances used when validating operators and grouping
/// eigenvalues into eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity / unitarity slack relative to `1 + ||A||_F`.
    pub herm_rel: f64,
    /// Eigenvalues closer than `degen_rel * (max - min)` share an eigenspace
    /// (see [`degeneracy_tolerance`] for the floor).
    pub degen_rel: f64,
    /// Allowed deviation of a state vector's norm from 1.
    pub norm_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_rel: 1e-10,
            degen_rel: 1e-8,
            norm_abs: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn herm(&self, m: &DMatrix<C64>) -> f64 {
        self.herm_rel * (1.0 + m.norm())
    }
}

/// A validated square matrix of finite complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self, HilbertError> {
        if m.nrows() != m.ncols() {
            return Err(HilbertError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(HilbertError::Empty);
        }
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                let z = m[(row, col)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(HilbertError::NonFinite { row, col });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self, HilbertError> {
        let rows = re.len();
        if im.len() != rows {
            return Err(HilbertError::DimensionMismatch {
                left: rows,
                right: im.len(),
            });
        }
        let cols = re.first().map_or(0, Vec::len);
        for (r, i) in re.iter().zip(im) {
            if r.len() != cols || i.len() != cols {
                return Err(HilbertError::NotSquare {
                    rows,
                    cols: r.len().max(i.len()),
                });
            }
        }
        let m = DMatrix::from_fn(rows, cols, |i, j| C64::new(re[i][j], im[i][j]));
        Self::new(m)
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self, HilbertError> {
        let zeros: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        Self::from_parts(rows, &zeros)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_unitary(&self, tol: &Tolerances) -> bool {
        unitarity_defect(&self.0) <= tol.herm(&self.0)
    }
}

fn unitarity_defect(w: &DMatrix<C64>) -> f64 {
    let n = w.nrows();
    (w.adjoint() * w - DMatrix::<C64>::identity(n, n)).norm()
}

/// Self-adjoint operator on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self, HilbertError> {
        make_hermitian_with(m, &Tolerances::default())
    }

    /// Wraps a real symmetric matrix given as rows.
    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self, HilbertError> {
        Self::new(ComplexMatrix::from_real(rows)?)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self, HilbertError> {
        let n = values.len();
        if n == 0 {
            return Err(HilbertError::Empty);
        }
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::new(ComplexMatrix::new(m)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Symmetrizes without validation; callers guarantee Hermiticity up to rounding.
    pub(crate) fn from_hermitian_unchecked(m: DMatrix<C64>) -> Self {
        let matrix = (&m + m.adjoint()).scale(0.5);
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn to_complex_matrix(&self) -> ComplexMatrix {
        ComplexMatrix(self.matrix.clone())
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }
}

/// Validates `m` as Hermitian, symmetrizing away rounding-level asymmetry.
pub fn make_hermitian(m: ComplexMatrix) -> Result<HermitianOperator, HilbertError> {
    make_hermitian_with(m, &Tolerances::default())
}

pub fn make_hermitian_with(
    m: ComplexMatrix,
    tol: &Tolerances,
) -> Result<HermitianOperator, HilbertError> {
    let m = m.0;
    let asymmetry = (&m - m.adjoint()).norm();
    let tolerance = tol.herm(&m);
    if asymmetry > tolerance {
        return Err(HilbertError::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    if asymmetry == 0.0 {
        return Ok(HermitianOperator { matrix: m });
    }
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

/// Unit vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self, HilbertError> {
        let tol = Tolerances::default().norm_abs;
        if amplitudes.is_empty() {
            return Err(HilbertError::Empty);
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(HilbertError::NotNormalized {
                norm,
                tolerance: tol,
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(v: DVector<C64>) -> Result<Self, HilbertError> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(HilbertError::NotNormalized {
                norm,
                tolerance: Tolerances::default().norm_abs,
            });
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, HilbertError> {
        Self::new(DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// The `index`-th standard basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64, HilbertError> {
        if self.dim() != other.dim() {
            return Err(HilbertError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// The rank-one projector `|self><self|`.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Closed real interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn all() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A Borel-style selection of spectral values: explicit points or a union of
/// closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueSet {
    /// Eigenvalues within the decomposition's degeneracy tolerance of a listed
    /// point are selected.
    Points(Vec<f64>),
    Intervals(Vec<Interval>),
}

impl ValueSet {
    pub fn interval(lo: f64, hi: f64) -> Self {
        ValueSet::Intervals(vec![Interval::new(lo, hi)])
    }

    fn contains(&self, x: f64, point_tol: f64) -> bool {
        match self {
            ValueSet::Points(points) => points.iter().any(|&p| (p - x).abs() <= point_tol),
            ValueSet::Intervals(intervals) => intervals.iter().any(|iv| iv.contains(x)),
        }
    }
}

/// Finite projection-valued measure: distinct eigenvalues in ascending order
/// with the orthogonal projector onto each eigenspace.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Orthonormal basis (as columns) of each eigenspace.
    bases: Vec<DMatrix<C64>>,
    projectors: Vec<DMatrix<C64>>,
    merge_tol: f64,
}

impl SpectralDecomposition {
    /// Builds the decomposition of a diagonal operator with the given
    /// (strictly ascending) diagonal, i.e. the standard-basis PVM.
    pub fn diagonal(values: &[f64]) -> Result<Self, HilbertError> {
        spectral_decompose(&HermitianOperator::diagonal(values)?)
    }

    pub fn dim(&self) -> usize {
        self.projectors.first().map_or(0, |p| p.nrows())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[DMatrix<C64>] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Orthonormal eigenvectors spanning the `j`-th eigenspace, as columns.
    pub fn eigenspace_basis(&self, j: usize) -> &DMatrix<C64> {
        &self.bases[j]
    }

    pub fn rank(&self, j: usize) -> usize {
        self.bases[j].ncols()
    }

    /// Index of the eigenvalue within the merge tolerance of `value`.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        self.eigenvalues
            .iter()
            .position(|&u| (u - value).abs() <= self.merge_tol.max(f64::EPSILON * u.abs()))
    }

    /// True when every eigenvalue is simple.
    pub fn is_nondegenerate(&self) -> bool {
        self.bases.iter().all(|b| b.ncols() == 1)
    }

    /// Normalized eigenvector of a simple eigenvalue.
    pub fn eigenvector(&self, j: usize) -> Option<StateVector> {
        let b = &self.bases[j];
        (b.ncols() == 1).then(|| StateVector {
            amplitudes: b.column(0).into_owned(),
        })
    }

    /// `sum_j weights[j] * P_j`.
    pub fn weighted_sum(&self, weights: &[f64]) -> DMatrix<C64> {
        let n = self.dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (p, &w) in self.projectors.iter().zip(weights) {
            if w != 0.0 {
                acc += p.scale(w);
            }
        }
        acc
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        HermitianOperator::from_hermitian_unchecked(self.weighted_sum(&self.eigenvalues))
    }

    /// `sum_j f(u_j) P_j`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<HermitianOperator, HilbertError> {
        let mut values = Vec::with_capacity(self.len());
        for &u in &self.eigenvalues {
            let v = f(u);
            if !v.is_finite() {
                return Err(HilbertError::DomainError { eigenvalue: u });
            }
            values.push(v);
        }
        Ok(HermitianOperator::from_hermitian_unchecked(
            self.weighted_sum(&values),
        ))
    }
}

/// Absolute floor for the degeneracy tolerance, relative to the largest
/// eigenvalue modulus. Without it a spectrum whose whole spread is rounding
/// noise (a multiple of the identity, say) would never merge.
pub const DEGEN_FLOOR: f64 = 1e-12;

/// `max(rel * range, DEGEN_FLOOR * max |u|)` for eigenvalues `values`.
pub fn degeneracy_tolerance(rel: f64, values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| (lo.min(u), hi.max(u)));
    (rel * (hi - lo)).max(DEGEN_FLOOR * lo.abs().max(hi.abs()))
}

pub fn spectral_decompose(a: &HermitianOperator) -> Result<SpectralDecomposition, HilbertError> {
    spectral_decompose_with(a, &Tolerances::default())
}

pub fn spectral_decompose_with(
    a: &HermitianOperator,
    tol: &Tolerances,
) -> Result<SpectralDecomposition, HilbertError> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.matrix.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(HilbertError::EigensolverFailure { dim: n })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if sorted.iter().any(|u| !u.is_finite()) {
        return Err(HilbertError::EigensolverFailure { dim: n });
    }
    let merge_tol = degeneracy_tolerance(tol.degen_rel, &sorted);

    // Consecutive eigenvalues closer than the merge tolerance form one block.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &u) in sorted.iter().enumerate() {
        match blocks.last_mut() {
            Some(block) if u - sorted[*block.last().unwrap()] <= merge_tol => block.push(k),
            _ => blocks.push(vec![k]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(blocks.len());
    let mut bases = Vec::with_capacity(blocks.len());
    let mut projectors = Vec::with_capacity(blocks.len());
    for block in blocks {
        let mean = block.iter().map(|&k| sorted[k]).sum::<f64>() / block.len() as f64;
        let basis = DMatrix::from_fn(n, block.len(), |row, c| {
            eig.eigenvectors[(row, order[block[c]])]
        });
        let proj = &basis * basis.adjoint();
        let proj = (&proj + proj.adjoint()).scale(0.5);
        eigenvalues.push(mean);
        bases.push(basis);
        projectors.push(proj);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        bases,
        projectors,
        merge_tol,
    })
}

/// `f(A) = sum_j f(u_j) P_j`. Fails if `f` is not finite at some eigenvalue.
pub fn apply_function<F: Fn(f64) -> f64>(
    a: &HermitianOperator,
    f: F,
) -> Result<HermitianOperator, HilbertError> {
    spectral_decompose(a)?.map(f)
}

/// Orthogonal projector onto the eigenspaces whose eigenvalue lies in `set`.
pub fn projector_onto(s: &SpectralDecomposition, set: &ValueSet) -> ComplexMatrix {
    let weights: Vec<f64> = s
        .eigenvalues
        .iter()
        .map(|&u| {
            let point_tol = s.merge_tol.max(1e-12 * (1.0 + u.abs()));
            if set.contains(u, point_tol) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    ComplexMatrix(s.weighted_sum(&weights))
}

pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator {
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

pub fn tensor_state(u: &StateVector, v: &StateVector) -> StateVector {
    StateVector {
        amplitudes: u.amplitudes.kronecker(&v.amplitudes),
    }
}

/// `W^H A W` for unitary `W`.
pub fn conjugate_by_unitary(
    a: &HermitianOperator,
    w: &ComplexMatrix,
) -> Result<HermitianOperator, HilbertError> {
    if w.dim() != a.dim() {
        return Err(HilbertError::DimensionMismatch {
            left: a.dim(),
            right: w.dim(),
        });
    }
    let tol = Tolerances::default();
    let defect = unitarity_defect(&w.0);
    let tolerance = tol.herm(&w.0);
    if defect > tolerance {
        return Err(HilbertError::NotUnitary { defect, tolerance });
    }
    let m = w.0.adjoint() * &a.matrix * &w.0;
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}
