use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, DensityState, HermitianOperator};
use crate::linalg::ComplexMatrix;

use super::{image_basis, rank_of};

/// The face of the state space through `ρ`: states supported on `Im ρ`.
#[derive(Debug, Clone)]
pub struct FaceDescription {
    /// Orthonormal columns spanning `Im ρ`.
    pub support_basis: ComplexMatrix,
    /// `V† ρ V`, a k x k density state.
    pub reduced_state: DensityState,
}

impl FaceDescription {
    pub fn dim(&self) -> usize {
        self.support_basis.ncols()
    }

    pub fn support_projector(&self) -> HermitianOperator {
        let v = &self.support_basis;
        HermitianOperator::hermitian_part(&(v * v.adjoint()))
    }

    /// Embeds a k x k state of the reduced body back into the face.
    pub fn embed(&self, reduced: &DensityState) -> Result<DensityState> {
        ensure_dim(self.dim(), reduced.dim())?;
        let v = &self.support_basis;
        DensityState::new(HermitianOperator::hermitian_part(&(v * reduced.matrix() * v.adjoint())))
    }
}

pub fn face_of(rho: &DensityState, tol: f64) -> FaceDescription {
    let v = image_basis(rho.op(), tol);
    let reduced = HermitianOperator::hermitian_part(&(v.adjoint() * rho.matrix() * &v));
    let reduced_state = DensityState::normalize(&reduced).expect("compression of a state to its support");
    FaceDescription {
        support_basis: v,
        reduced_state,
    }
}

/// `σ = P σ P` within `tol` (Frobenius), with `P` the support projector of the face.
pub fn in_face(sigma: &DensityState, face: &FaceDescription, tol: f64) -> Result<bool> {
    ensure_dim(face.support_basis.nrows(), sigma.dim())?;
    let p = face.support_projector();
    let compressed = p.matrix() * sigma.matrix() * p.matrix();
    Ok((sigma.matrix() - compressed).norm() <= tol)
}

/// Both states lie in each other's face, i.e. they have the same support.
pub fn same_face(rho: &DensityState, sigma: &DensityState, rank_tol: f64, tol: f64) -> Result<bool> {
    Ok(in_face(sigma, &face_of(rho, rank_tol), tol)? && in_face(rho, &face_of(sigma, rank_tol), tol)?)
}

/// Extreme points of the state space are exactly the rank-one states.
pub fn is_extreme(rho: &DensityState, tol: f64) -> bool {
    rank_of(rho.op(), tol) == 1
}

/// The point where the sphere around `I/n` through the rank-(n-1) states touches the
/// face opposite to a pure state `P`.
#[derive(Debug, Clone)]
pub struct TangencyPoint {
    /// `(I - P) / (n - 1)`.
    pub point: DensityState,
    /// Frobenius distance to `I/n`; equals `1/sqrt(n(n-1))`.
    pub distance: f64,
    /// Angle between `point - I/n` and `I/n - P`.
    pub collinearity_angle: f64,
}

pub fn tangency_point(p: &DensityState, tol: f64) -> Result<TangencyPoint> {
    let n = p.dim();
    if n < 2 {
        return Err(Error::InvalidArgument("tangency point needs n >= 2".into()));
    }
    let rank = rank_of(p.op(), tol);
    if rank != 1 || (p.purity() - 1.0).abs() > 1e-9 {
        return Err(Error::NotPure(rank));
    }
    let id = HermitianOperator::identity(n);
    let point = DensityState::new((&id - p.op()).scale(1.0 / (n - 1) as f64))?;
    let center = id.scale(1.0 / n as f64);
    let distance = (point.op() - &center).norm();
    let collinearity_angle = collinearity_angle(point.op(), &center, p.op())?;
    Ok(TangencyPoint {
        point,
        distance,
        collinearity_angle,
    })
}

/// Angle between `a - b` and `b - c`; zero when `b` lies on the segment from `a` to `c`.
///
/// Zero vectors give angle zero.
pub fn collinearity_angle(a: &HermitianOperator, b: &HermitianOperator, c: &HermitianOperator) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    ensure_dim(a.dim(), c.dim())?;
    let u = a.matrix() - b.matrix();
    let v = b.matrix() - c.matrix();
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    let (u, v) = (u.unscale(nu), v.unscale(nv));
    Ok(2.0 * (&u - &v).norm().atan2((&u + &v).norm()))
}
