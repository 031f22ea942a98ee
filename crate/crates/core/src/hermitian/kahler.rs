//! Pointwise tensors on u*(H): the KKS Poisson tensor Λ, the Riemann-Jordan
//! tensor R, their (1,1) versions J̃_ξ(A) = [A,ξ] and R̃_ξ(A) = [A,ξ]_+, and the
//! normalized tensors 𝒥 (with 𝒥³ = -𝒥) and ℛ (with ℛ³ = ℛ).

use nalgebra::DMatrix;

use super::superop::truncated_svd;
use super::{ensure_dim, hs_inner, jordan_bracket, lie_bracket, HermitianOperator, Superoperator, PINV_CUTOFF};
use crate::error::Result;
use crate::linalg::trace_product;

/// `Λ(ξ)(Â,B̂) = Tr(ξ(AB - BA))/(2i)`.
pub fn poisson_tensor(
    xi: &HermitianOperator,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<f64> {
    ensure_dim(xi.dim(), a.dim())?;
    hs_inner(xi, &lie_bracket(a, b)?)
}

/// `R(ξ)(Â,B̂) = Tr(ξ(AB + BA))/2`.
pub fn riemann_jordan_tensor(
    xi: &HermitianOperator,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<f64> {
    ensure_dim(xi.dim(), a.dim())?;
    hs_inner(xi, &jordan_bracket(a, b)?)
}

/// `J̃_ξ(A) = [A, ξ]`.
pub fn tilde_j(xi: &HermitianOperator, a: &HermitianOperator) -> Result<HermitianOperator> {
    lie_bracket(a, xi)
}

/// `R̃_ξ(A) = [A, ξ]_+`.
pub fn tilde_r(xi: &HermitianOperator, a: &HermitianOperator) -> Result<HermitianOperator> {
    jordan_bracket(a, xi)
}

fn tilde_j_superoperator(xi: &HermitianOperator) -> Result<Superoperator> {
    Superoperator::from_map(xi.dim(), |a| tilde_j(xi, a))
}

fn tilde_r_superoperator(xi: &HermitianOperator) -> Result<Superoperator> {
    Superoperator::from_map(xi.dim(), |a| tilde_r(xi, a))
}

/// `L ∘ (LᵀL)^{-1/2}` on the image of `L`, zero on its orthogonal complement.
///
/// The spectral data of `LᵀL` is taken from the SVD of `L`, so kernel
/// directions are decided on singular values rather than their squares.
fn normalized_map(l: &Superoperator) -> Superoperator {
    let (_u, s, v) = truncated_svd(l.matrix(), PINV_CUTOFF);
    let d = l.matrix().nrows();
    let mut inv_abs = DMatrix::zeros(d, d);
    for (k, sigma) in s.iter().enumerate() {
        let col = v.column(k);
        inv_abs += (&col * col.transpose()) / *sigma;
    }
    Superoperator::from_parts(l.basis().clone(), l.matrix() * inv_abs)
}

/// The complex structure `𝒥_ξ = J̃_ξ ∘ (-J̃_ξ²|_D)^{-1/2}` as a superoperator.
pub fn kahler_j_superoperator(xi: &HermitianOperator) -> Result<Superoperator> {
    // J̃ is skew-adjoint, so -J̃² = J̃ᵀJ̃
    Ok(normalized_map(&tilde_j_superoperator(xi)?))
}

/// `ℛ_ξ = R̃_ξ ∘ |R̃_ξ|_D|^{-1}` as a superoperator.
pub fn kahler_r_superoperator(xi: &HermitianOperator) -> Result<Superoperator> {
    Ok(normalized_map(&tilde_r_superoperator(xi)?))
}

pub fn kahler_j(xi: &HermitianOperator, a: &HermitianOperator) -> Result<HermitianOperator> {
    ensure_dim(xi.dim(), a.dim())?;
    kahler_j_superoperator(xi)?.apply(a)
}

pub fn kahler_r(xi: &HermitianOperator, a: &HermitianOperator) -> Result<HermitianOperator> {
    ensure_dim(xi.dim(), a.dim())?;
    kahler_r_superoperator(xi)?.apply(a)
}

/// Symplectic form, complex structure and metric on the unitary orbit through ξ.
///
/// Tangent vectors are the elements `[A', ξ]` of `D_Λ(ξ)`. The metric is
/// `γ(X, Y) = η(𝒥X, Y)`, which is positive definite with the bracket
/// conventions used here and satisfies `γ(X, 𝒥Y) = η(X, Y)`.
#[derive(Debug, Clone)]
pub struct OrbitGeometry {
    xi: HermitianOperator,
    tilde_j: Superoperator,
    tilde_j_pinv: DMatrix<f64>,
    complex_structure: Superoperator,
}

impl OrbitGeometry {
    pub fn at(xi: &HermitianOperator) -> Result<Self> {
        let tj = tilde_j_superoperator(xi)?;
        let (u, s, v) = truncated_svd(tj.matrix(), PINV_CUTOFF);
        let d = tj.matrix().nrows();
        let mut pinv = DMatrix::zeros(d, d);
        for (k, sigma) in s.iter().enumerate() {
            pinv += (v.column(k) * u.column(k).transpose()) / *sigma;
        }
        let complex_structure = normalized_map(&tj);
        Ok(OrbitGeometry {
            xi: xi.clone(),
            tilde_j: tj,
            tilde_j_pinv: pinv,
            complex_structure,
        })
    }

    pub fn point(&self) -> &HermitianOperator {
        &self.xi
    }

    /// `[A', ξ]`.
    pub fn tangent(&self, generator: &HermitianOperator) -> Result<HermitianOperator> {
        self.tilde_j.apply(generator)
    }

    /// Distance of `x` from the tangent space `D_Λ(ξ)` (Frobenius norm).
    pub fn normal_residual(&self, x: &HermitianOperator) -> Result<f64> {
        let c = self.tilde_j.basis().coordinates(x)?;
        let projected = self.tilde_j.matrix() * (&self.tilde_j_pinv * &c);
        let basis = self.tilde_j.basis();
        Ok((&basis.operator(&(c - projected))).norm())
    }

    pub fn complex_structure(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        self.complex_structure.apply(x)
    }

    /// `η(X, Y) = <ξ, [X', Y']>` for tangent vectors `X = [X', ξ]`, `Y = [Y', ξ]`.
    pub fn symplectic(&self, x: &HermitianOperator, y: &HermitianOperator) -> Result<f64> {
        let basis = self.tilde_j.basis();
        let cx = basis.coordinates(x)?;
        let cy = basis.coordinates(y)?;
        // <ξ,[X',Y']> = <[ξ,X'],Y'> = -<X, Y'> and Y' = J̃⁺Y up to ker J̃ ⊥ X
        Ok(-cx.dot(&(&self.tilde_j_pinv * cy)))
    }

    /// `γ(X, Y) = η(𝒥X, Y)`.
    pub fn metric(&self, x: &HermitianOperator, y: &HermitianOperator) -> Result<f64> {
        let jx = self.complex_structure(x)?;
        self.symplectic(&jx, y)
    }
}

/// `η(ξ)([A',ξ],[B',ξ]) = <ξ, [A',B']>`, taking the generators A', B'.
pub fn orbit_symplectic(
    xi: &HermitianOperator,
    a_gen: &HermitianOperator,
    b_gen: &HermitianOperator,
) -> Result<f64> {
    ensure_dim(xi.dim(), a_gen.dim())?;
    hs_inner(xi, &lie_bracket(a_gen, b_gen)?)
}

/// The orbit metric `γ` evaluated on `[A',ξ]` and `[B',ξ]`.
pub fn orbit_metric(
    xi: &HermitianOperator,
    a_gen: &HermitianOperator,
    b_gen: &HermitianOperator,
) -> Result<f64> {
    ensure_dim(xi.dim(), a_gen.dim())?;
    ensure_dim(xi.dim(), b_gen.dim())?;
    let geo = OrbitGeometry::at(xi)?;
    let x = geo.tangent(a_gen)?;
    let y = geo.tangent(b_gen)?;
    geo.metric(&x, &y)
}

/// `(R + iΛ)(ξ)(Â,B̂) = Tr(ξAB)`.
pub fn complex_tensor(
    xi: &HermitianOperator,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> num_complex::Complex64 {
    trace_product(xi.matrix(), &(a.matrix() * b.matrix()))
}
