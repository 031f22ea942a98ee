//! Rank and signature strata of u*(H) and of the density states, tangent
//! spaces of GL orbits, explicit charts, faces and the tangency sphere.

mod chart;
mod curve;
mod face;

pub use chart::{chart_forward, chart_reconstruct, select_chart, ChartCoordinates, ChartIndex};
pub use curve::{curve_stratum_tangency, CurveSample, TangencyReport};
pub use face::{
    collinearity_angle, face_of, in_face, is_extreme, same_face, tangency_point, FaceDescription,
    TangencyPoint,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, HermitianBasis, HermitianOperator};
use crate::linalg::{ComplexMatrix, Spectrum, C64, I, ONE};

/// Default relative cutoff `tol · max|λ|` used for ranks and kernels.
pub const RANK_TOL: f64 = 1e-8;

/// Numbers of positive and negative eigenvalues above the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub k_plus: usize,
    pub k_minus: usize,
}

impl Signature {
    pub fn new(k_plus: usize, k_minus: usize) -> Self {
        Signature { k_plus, k_minus }
    }

    pub fn rank(&self) -> usize {
        self.k_plus + self.k_minus
    }
}

fn cutoff(s: &Spectrum, tol: f64) -> f64 {
    tol * s.max_abs_eigenvalue()
}

/// Count of eigenvalues with `|λ| > tol · max|λ|`; zero for the zero operator.
pub fn rank_of(xi: &HermitianOperator, tol: f64) -> usize {
    let sig = signature_of(xi, tol);
    sig.rank()
}

pub fn signature_of(xi: &HermitianOperator, tol: f64) -> Signature {
    let s = xi.spectrum();
    let c = cutoff(&s, tol);
    if s.max_abs_eigenvalue() == 0.0 {
        return Signature::new(0, 0);
    }
    Signature {
        k_plus: s.eigenvalues.iter().filter(|&&l| l > c).count(),
        k_minus: s.eigenvalues.iter().filter(|&&l| l < -c).count(),
    }
}

/// Real dimension `2nk - k²` of the GL orbit through operators of signature `sig`.
pub fn orbit_dimension(n: usize, sig: Signature) -> Result<usize> {
    let k = sig.rank();
    if k > n {
        return Err(Error::InvalidSignature { k, n });
    }
    Ok(2 * n * k - k * k)
}

/// Columns spanning `Ker ξ` (eigenvectors with `|λ| <= tol · max|λ|`).
pub fn kernel_basis(xi: &HermitianOperator, tol: f64) -> ComplexMatrix {
    let s = xi.spectrum();
    let c = cutoff(&s, tol);
    let idx: Vec<usize> = (0..s.eigenvalues.len())
        .filter(|&k| s.max_abs_eigenvalue() == 0.0 || s.eigenvalues[k].abs() <= c)
        .collect();
    select_columns(&s.eigenvectors, &idx)
}

/// Columns spanning `Im ξ`.
pub fn image_basis(xi: &HermitianOperator, tol: f64) -> ComplexMatrix {
    let s = xi.spectrum();
    let c = cutoff(&s, tol);
    let idx: Vec<usize> = (0..s.eigenvalues.len())
        .filter(|&k| s.max_abs_eigenvalue() > 0.0 && s.eigenvalues[k].abs() > c)
        .collect();
    select_columns(&s.eigenvectors, &idx)
}

pub(crate) fn select_columns(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.nrows(), idx.len());
    for (dst, &src) in idx.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// Frobenius norm of `B` compressed to `Ker ξ`, with the kernel cut at `rank_tol`.
pub fn kernel_block_norm(xi: &HermitianOperator, b: &HermitianOperator, rank_tol: f64) -> Result<f64> {
    ensure_dim(xi.dim(), b.dim())?;
    let k = kernel_basis(xi, rank_tol);
    if k.ncols() == 0 {
        return Ok(0.0);
    }
    Ok((k.adjoint() * b.matrix() * &k).norm())
}

/// `B` is tangent to the GL orbit of `ξ` iff `<Bx, y> = 0` for all `x, y ∈ Ker ξ`.
pub fn tangent_membership(xi: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    Ok(kernel_block_norm(xi, b, RANK_TOL)? <= tol)
}

/// Real matrix of the linearized action `T -> Tξ + ξT†`, `T ∈ gl(n)`, columns indexed
/// by the real parameters `Re T_jk`, `Im T_jk`.
pub fn gl_action_matrix(xi: &HermitianOperator) -> DMatrix<f64> {
    let n = xi.dim();
    let basis = HermitianBasis::new(n);
    let mut m = DMatrix::zeros(n * n, 2 * n * n);
    let mut col = 0;
    for j in 0..n {
        for k in 0..n {
            for unit in [ONE, I] {
                let mut t = ComplexMatrix::zeros(n, n);
                t[(j, k)] = unit;
                let image = &t * xi.matrix() + xi.matrix() * t.adjoint();
                let h = HermitianOperator::hermitian_part(&image);
                m.set_column(col, &basis.coordinates(&h).expect("same dimension"));
                col += 1;
            }
        }
    }
    m
}

/// Numerical rank of [`gl_action_matrix`], the dimension of the orbit tangent space.
pub fn gl_orbit_tangent_rank(xi: &HermitianOperator, tol: f64) -> usize {
    crate::hermitian::real_rank(&gl_action_matrix(xi), tol)
}

/// `Tξ + ξT†` for a given generator `T`.
pub fn gl_tangent(xi: &HermitianOperator, t: &ComplexMatrix) -> Result<HermitianOperator> {
    ensure_dim(xi.dim(), t.nrows())?;
    ensure_dim(xi.dim(), t.ncols())?;
    Ok(HermitianOperator::hermitian_part(
        &(t * xi.matrix() + xi.matrix() * t.adjoint()),
    ))
}

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
