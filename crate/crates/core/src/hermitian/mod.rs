//! Hermitian operators as the dual u*(H) of the unitary Lie algebra.
//!
//! The space carries the scalar product `<A,B> = Tr(AB)/2`, the Lie bracket
//! `[A,B] = (AB - BA)/i` and the Jordan product `[A,B]_+ = AB + BA`. Pure
//! vectors enter through the momentum map `x -> |x><x|`.

mod kahler;
mod superop;

pub use kahler::{
    complex_tensor, kahler_j, kahler_j_superoperator, kahler_r, kahler_r_superoperator, orbit_metric,
    orbit_symplectic, poisson_tensor, riemann_jordan_tensor, tilde_j, tilde_r, OrbitGeometry,
};
pub use superop::{HermitianBasis, Superoperator};
pub(crate) use superop::real_rank;

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{
    all_finite, hermitian_residual, trace_product, ComplexMatrix, ComplexVector, Spectrum, C64,
    I, ONE, ZERO,
};

/// Hermiticity tolerance (absolute, on unit-scale matrices).
pub const TAU_HERM: f64 = 1e-9;
/// Lower bound accepted for eigenvalues of a positive operator.
pub const TAU_PSD: f64 = 1e-9;
/// Allowed deviation of a density trace from one.
pub const TAU_TRACE: f64 = 1e-9;
/// Allowed deviation of a normalized vector from unit norm.
pub const TAU_NORM: f64 = 1e-9;
/// Accuracy expected from superoperator functional calculus.
pub const TAU_NUM: f64 = 1e-8;
/// Relative singular-value cutoff separating kernel from image.
pub const PINV_CUTOFF: f64 = 1e-10;

/// An element of u*(H): an n x n complex matrix equal to its adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates with [`TAU_HERM`] and replaces the input by its Hermitian part.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TAU_HERM)
    }

    /// The residual is measured relative to `max(1, max|a_ij|)`.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if !all_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let scale = crate::linalg::max_abs(&matrix).max(1.0);
        let residual = hermitian_residual(&matrix);
        if residual > tol * scale {
            return Err(Error::NotHermitian(residual));
        }
        Ok(Self::hermitian_part(&matrix))
    }

    /// `(M + M†)/2`, without validation.
    pub fn hermitian_part(matrix: &ComplexMatrix) -> Self {
        HermitianOperator {
            matrix: (matrix + matrix.adjoint()).scale(0.5),
        }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::identity(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(d, 0.0);
        }
        HermitianOperator { matrix: m }
    }

    pub fn pauli_x() -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn pauli_y() -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator {
            matrix: self.matrix.scale(s),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Conjugation `T ξ T†` by an arbitrary square matrix.
    pub fn congruence(&self, t: &ComplexMatrix) -> Result<Self> {
        ensure_dim(self.dim(), t.nrows())?;
        ensure_dim(self.dim(), t.ncols())?;
        Ok(Self::hermitian_part(&(t * &self.matrix * t.adjoint())))
    }
}

impl<'a> Add<&'a HermitianOperator> for &'a HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl<'a> Sub<&'a HermitianOperator> for &'a HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, s: f64) -> HermitianOperator {
        self.scale(s)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

/// A vector x in H, not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amplitudes: ComplexVector,
}

impl PureStateVector {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PureStateVector { amplitudes })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(ComplexVector::from_column_slice(amplitudes))
    }

    /// Rescales to unit norm; the zero vector is rejected.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = ComplexVector::zeros(n);
        v[k] = ONE;
        PureStateVector { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TAU_NORM
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm()))
        }
    }

    pub fn tensor(&self, other: &PureStateVector) -> PureStateVector {
        PureStateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// A positive semidefinite Hermitian operator of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    op: HermitianOperator,
}

impl DensityState {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::with_tolerances(op, TAU_PSD, TAU_TRACE)
    }

    /// Accepts eigenvalues down to `-tol_psd` and traces within `tol_trace` of one.
    pub fn with_tolerances(op: HermitianOperator, tol_psd: f64, tol_trace: f64) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > tol_trace {
            return Err(Error::InvalidTrace(tr));
        }
        let min = op.spectrum().min_eigenvalue();
        if min < -tol_psd {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityState { op })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// Divides a nonzero positive operator by its trace.
    pub fn normalize(op: &HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(Error::NonPositiveTrace(tr));
        }
        Self::new(op.scale(1.0 / tr))
    }

    /// |x><x| / ||x||².
    pub fn pure(x: &PureStateVector) -> Result<Self> {
        let norm2 = x.norm().powi(2);
        if norm2 == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(DensityState {
            op: momentum_map(x).scale(1.0 / norm2),
        })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        DensityState {
            op: HermitianOperator::identity(n).scale(1.0 / n as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        trace_product(self.matrix(), self.matrix()).re
    }

    /// Convex combination `λ self + (1-λ) other`.
    pub fn mix(&self, other: &DensityState, lambda: f64) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("mixing weight {lambda} outside [0,1]")));
        }
        Ok(DensityState {
            op: &self.op.scale(lambda) + &other.op.scale(1.0 - lambda),
        })
    }
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `<A,B> = Tr(AB)/2`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    Ok(0.5 * trace_product(a.matrix(), b.matrix()).re)
}

/// `[A,B] = (AB - BA)/i`.
pub fn lie_bracket(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    ensure_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(HermitianOperator::hermitian_part(&((ab - ba) * (-I))))
}

/// `[A,B]_+ = AB + BA`.
pub fn jordan_bracket(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    ensure_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    Ok(HermitianOperator::hermitian_part(&(&ab + ab.adjoint())))
}

/// `μ(x) = |x><x|`.
pub fn momentum_map(x: &PureStateVector) -> HermitianOperator {
    let v = x.amplitudes();
    HermitianOperator::hermitian_part(&(v * v.adjoint()))
}

/// `f_A(x) = <x, Ax>/2` for Hermitian A.
pub fn quadratic_function(a: &HermitianOperator, x: &PureStateVector) -> Result<f64> {
    Ok(quadratic_function_gl(a.matrix(), x)?.re)
}

/// `f_A(x) = <x, Ax>/2` for an arbitrary operator; complex unless A is Hermitian.
pub fn quadratic_function_gl(a: &ComplexMatrix, x: &PureStateVector) -> Result<C64> {
    ensure_dim(a.nrows(), x.dim())?;
    ensure_dim(a.ncols(), x.dim())?;
    let v = x.amplitudes();
    Ok(v.dotc(&(a * v)) * 0.5)
}

/// Riemannian and symplectic brackets of two quadratic functions at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionBracket {
    /// `{f_A, f_B}_g = g(grad f_A, grad f_B)`.
    pub metric: f64,
    /// `{f_A, f_B}_ω = ω(Ham f_A, Ham f_B)`.
    pub symplectic: f64,
}

impl FunctionBracket {
    /// `{f_A, f_B}_H = {·,·}_g + i {·,·}_ω`.
    pub fn total(&self) -> C64 {
        C64::new(self.metric, self.symplectic)
    }
}

/// Evaluates the brackets of `f_A` and `f_B` at `x` from the vector fields
/// `grad f_A = Ax` and `Ham f_A = iAx`, with `g + iω = <·,·>`.
pub fn function_bracket(
    a: &HermitianOperator,
    b: &HermitianOperator,
    x: &PureStateVector,
) -> Result<FunctionBracket> {
    ensure_dim(a.dim(), b.dim())?;
    ensure_dim(a.dim(), x.dim())?;
    let v = x.amplitudes();
    let grad_a = a.matrix() * v;
    let grad_b = b.matrix() * v;
    let ham_a = &grad_a * I;
    let ham_b = &grad_b * I;
    Ok(FunctionBracket {
        metric: grad_a.dotc(&grad_b).re,
        symplectic: ham_a.dotc(&ham_b).im,
    })
}
